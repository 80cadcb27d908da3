#pragma once

#include <cstdint>
#include <random>

namespace robitmc {

// Seeded random stream. A (seed, stream) pair fully determines the draw
// sequence; distinct streams from the same seed are independent for all
// practical purposes. All variate transforms are implemented explicitly so
// the sequence does not depend on the standard library's unspecified
// distribution algorithms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1): (k + 0.5) / 2^53.
  double uniform();

  // Standard normal via Box-Muller (no cached spare; one value per call).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace robitmc
