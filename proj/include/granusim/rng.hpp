#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace granusim {

using Engine = std::mt19937_64;

/// Labeled sub-streams derived from one master seed. Each stream is
/// independent, so re-seeding one never perturbs the others.
enum class Stream : std::uint8_t {
  TopologyWater,
  TopologyPower,
  TopologyBusiness,
  Interdependency,
  Pattern,
  Poisson,
  Layout,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t stream_seed(std::uint64_t master, Stream stream) noexcept;
std::uint64_t stream_seed(std::uint64_t master, std::string_view label) noexcept;

// The std distributions are implementation-defined; these are not, so a
// seed reproduces the same draws on every standard library.

/// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound);

/// Uniform integer in [lo, hi].
std::int64_t uniform_int(Engine& engine, std::int64_t lo, std::int64_t hi);

/// Uniform real in [0, 1) with 53 random bits.
double uniform_unit(Engine& engine) noexcept;

/// Exponential variate with the given rate (mean 1/rate).
double exponential(Engine& engine, double rate);

/// 64-bit FNV-1a, used for content hashes written to result files.
class Fnv1a {
public:
  void add(std::uint64_t value) noexcept;
  std::uint64_t value() const noexcept { return hash_; }

private:
  std::uint64_t hash_ = 1469598103934665603ull;
};

}  // namespace granusim
