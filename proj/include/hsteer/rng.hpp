// rng.hpp
// Seeding rule shared by every stochastic routine: a root seed is split into
// independent child streams by hashing (seed, stream) through SplitMix64, and
// each stream drives a std::mt19937_64.

#pragma once

#include <cstdint>
#include <random>

namespace hsteer {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for child stream `stream` of root seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0);

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
double uniform01(std::mt19937_64& engine);

}  // namespace hsteer
