// SPDX-License-Identifier: Apache-2.0
//
// Seed derivation. Every random quantity in the library comes from an engine
// built by make_stream, so (base seed, index, stream id) fixes the output.

#ifndef FASISABC_RANDOM_HPP
#define FASISABC_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace fas {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash64(std::uint64_t a, std::uint64_t b)
{
  return splitmix64(splitmix64(a) ^ (b + 0x632BE59BD9B4E019ULL + (a << 6) + (a >> 2)));
}

constexpr std::uint64_t hash64(std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
  return hash64(hash64(a, b), c);
}

/// Stream identifiers used by the simulator.
enum class StreamId : std::uint64_t {
  Gains = 1,
  Echo = 2,
  Ecdf = 3,
  MvnShifts = 4,
};

inline Rng make_stream(std::uint64_t base_seed, std::uint64_t index, StreamId stream)
{
  return Rng(hash64(base_seed, index, static_cast<std::uint64_t>(stream)));
}

/// Uniform on [0, 1) with 53 random bits; portable across standard libraries.
inline double uniform01(Rng& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unit-mean exponential by inversion.
inline double standard_exponential(Rng& rng)
{
  return -std::log1p(-uniform01(rng));
}

inline double standard_normal(Rng& rng)
{
  std::normal_distribution<double> dist;
  return dist(rng);
}

}  // namespace fas

#endif  // FASISABC_RANDOM_HPP
