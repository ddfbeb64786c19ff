#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "casimir/errors.hpp"

namespace casimir {

/// splitmix64 finalizer. Used to derive independent per-item seeds from a
/// master seed so that generation can be parallelized without changing output.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded random stream. Wraps std::mt19937_64 (bit-exact across platforms)
/// with hand-rolled uniform/normal mappings; the standard library
/// distributions are implementation-defined and would break the byte-identical
/// reproducibility contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform in log space on [lo, hi], lo > 0. Degenerate intervals return lo.
  double log_uniform(double lo, double hi) {
    if (lo == hi) return lo;
    if (lo <= 0.0) throw ConfigError("log_uniform: lower bound must be > 0");
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  /// Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace casimir
