#pragma once

#include <cmath>
#include <cstdint>

namespace smoothcert {

/// Small counter-seeded PRNG (splitmix64). Each (seed, id...) tuple opens an
/// independent stream, so parallel consumers get identical draws regardless
/// of scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool coin() { return (next_u64() & 1ULL) != 0; }

  /// Standard normal via Box-Muller (one value per call).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Unit-scale Gamma variate, Marsaglia-Tsang squeeze for shape >= 1 with
  /// the power-of-uniform boost for shape < 1. Exact (rejection), any shape > 0.
  double gamma(double shape) {
    if (shape < 1.0) {
      double g = gamma(shape + 1.0);
      return g * std::pow(uniform01(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform01();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
  z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
  return z ^ (z >> 33);
}
}  // namespace detail

/// Stream keyed by up to three ids, e.g. (seed, input, sample).
inline RngStream make_stream(std::uint64_t seed, std::uint64_t a = 0,
                             std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = detail::mix64(seed + 0x9e3779b97f4a7c15ULL);
  s = detail::mix64(s ^ (a + 0xbf58476d1ce4e5b9ULL));
  s = detail::mix64(s ^ (b + 0x94d049bb133111ebULL));
  s = detail::mix64(s ^ (c + 0x2545f4914f6cdd1dULL));
  return RngStream(s);
}

}  // namespace smoothcert
