#include "granusim/rng.hpp"

#include <cmath>
#include <limits>

#include "granusim/error.hpp"

namespace granusim {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::string_view label) noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return splitmix64(master ^ splitmix64(h));
}

std::uint64_t stream_seed(std::uint64_t master, Stream stream) noexcept {
  switch (stream) {
    case Stream::TopologyWater: return stream_seed(master, "topology/water");
    case Stream::TopologyPower: return stream_seed(master, "topology/power");
    case Stream::TopologyBusiness: return stream_seed(master, "topology/business");
    case Stream::Interdependency: return stream_seed(master, "interdependency");
    case Stream::Pattern: return stream_seed(master, "disruption/pattern");
    case Stream::Poisson: return stream_seed(master, "disruption/poisson");
    case Stream::Layout: return stream_seed(master, "experiment/layout");
  }
  return stream_seed(master, "unknown");
}

std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  if (bound == 0) throw PreconditionError("uniform_below: bound must be positive");
  // Rejection on the largest multiple of bound keeps the draw unbiased.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine();
  } while (r >= limit);
  return r % bound;
}

std::int64_t uniform_int(Engine& engine, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw PreconditionError("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine());  // full 64-bit range
  return lo + static_cast<std::int64_t>(uniform_below(engine, span));
}

double uniform_unit(Engine& engine) noexcept {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double exponential(Engine& engine, double rate) {
  if (!(rate > 0.0)) throw PreconditionError("exponential: rate must be positive");
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform_unit(engine)) / rate;
}

void Fnv1a::add(std::uint64_t value) noexcept {
  for (int i = 0; i < 8; ++i) {
    hash_ ^= (value >> (8 * i)) & 0xffu;
    hash_ *= 1099511628211ull;
  }
}

}  // namespace granusim
