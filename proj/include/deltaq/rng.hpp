#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace deltaq {

// FNV-1a over the label bytes; stable across platforms and runs.
std::uint64_t hash_label(std::string_view label) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Per-stream seed derived from (scenario seed, stream id).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream_id) noexcept;

/// A named, independently seeded random stream.
///
/// Every stream owns its engine, so the number of draws taken from one
/// stream never shifts the sequence seen by another. Streams with the same
/// (seed, id) pair replay identical sequences.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  RngStream(std::uint64_t seed, std::string_view stream_id);

  engine_type& engine() noexcept { return engine_; }

  // Uniform on [0, 1).
  double uniform();

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& id() const noexcept { return id_; }

 private:
  std::uint64_t seed_;
  std::string id_;
  engine_type engine_;
};

}  // namespace deltaq
