#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "osplit/core/types.hpp"

namespace osplit {

/// Counter-based 64-bit generator: draw k is splitmix64(seed + k * gamma).
/// Only integer arithmetic is involved, so sequences are identical on every
/// platform, and the distributions below avoid <random>'s
/// implementation-defined algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), rejection-sampled (no modulo bias).
  Index index(Index n) {
    require(n > 0, "Rng::index: n must be positive");
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t r;
    do r = next_u64();
    while (r >= limit);
    return static_cast<Index>(r % un);
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vector normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Vector uniform_vector(Index n, double lo, double hi) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Inverse-CDF sampler over a fixed nonnegative weight vector.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;

  explicit DiscreteSampler(std::span<const double> weights) { reset(weights); }
  explicit DiscreteSampler(const Vector& weights)
      : DiscreteSampler(std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size()))) {}

  void reset(std::span<const double> weights) {
    require(!weights.empty(), "DiscreteSampler: empty weight vector");
    cumulative_.resize(weights.size());
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      require(std::isfinite(weights[i]) && weights[i] >= 0.0,
              "DiscreteSampler: weights must be finite and nonnegative");
      s += weights[i];
      cumulative_[i] = s;
    }
    require(s > 0.0, "DiscreteSampler: weights must not all be zero");
    last_positive_ = static_cast<Index>(weights.size()) - 1;
    while (weights[static_cast<std::size_t>(last_positive_)] == 0.0) --last_positive_;
  }

  Index size() const { return static_cast<Index>(cumulative_.size()); }
  double total() const { return cumulative_.back(); }

  Index sample(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    // zero-weight entries repeat the previous cumulative value and are never
    // the first element greater than u
    if (it == cumulative_.end()) return last_positive_;
    return static_cast<Index>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
  Index last_positive_ = 0;
};

/// One draw from the distribution proportional to `weights`.
inline Index sample_discrete(Rng& rng, const Vector& weights) {
  return DiscreteSampler(weights).sample(rng);
}

}  // namespace osplit
