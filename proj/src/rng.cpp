#include "robitmc/rng.hpp"

#include <cmath>
#include <numbers>

namespace robitmc {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  // Mix seed and stream through splitmix64 into a seed_seq; both the mixer
  // and mt19937_64 are fully specified, so the sequence is reproducible.
  std::uint64_t s = seed ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
  std::uint32_t words[8];
  for (int i = 0; i < 4; ++i) {
    std::uint64_t w = splitmix64(s);
    words[2 * i] = static_cast<std::uint32_t>(w);
    words[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words, words + 8);
  engine_.seed(seq);
}

double RngStream::uniform() {
  const std::uint64_t k = engine_() >> 11;  // 53 bits
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace robitmc
