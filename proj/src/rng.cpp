#include "rjlt/rng.hpp"

#include <array>

namespace rjlt {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t master, std::uint64_t stream, std::uint64_t sub) {
  std::array<std::uint32_t, 6> words{
      static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
      static_cast<std::uint32_t>(sub),    static_cast<std::uint32_t>(sub >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t substream)
    : master_(master_seed),
      stream_(stream),
      substream_(substream),
      engine_(seeded_engine(master_seed, stream, substream)) {}

RngStream RngStream::child(std::uint64_t tag) const {
  return RngStream(master_, stream_, splitmix64(substream_ ^ splitmix64(tag + 1)));
}

double RngStream::uniform_open() {
  // 53 random bits mapped to the midpoints of a 2^-53 lattice: never 0 or 1.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

}  // namespace rjlt
