#pragma once
// Seeded generators for property tests.

#include <cstdint>
#include <random>

#include "scamdyn/model.hpp"

namespace gen {

class Source {
 public:
  explicit Source(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  // Log-uniform over [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  // Rates spread over several orders of magnitude, occasionally exactly 0.
  scamdyn::Parameters params() {
    scamdyn::Parameters p;
    for (auto id : scamdyn::kAllParams) {
      p[id] = coin(0.05) ? 0.0 : log_uniform(1e-6, 1.0);
    }
    return p;
  }

  // As params() but with gamma + psi > 0 and mu + lambda - delta > 0.
  scamdyn::Parameters subcritical_params() {
    for (;;) {
      auto p = params();
      if (p.gamma + p.psi > 0.0 && p.mu + p.lambda - p.delta > 1e-8 * (p.mu + p.lambda)) return p;
    }
  }

  scamdyn::State state(double scale = 1000.0) {
    scamdyn::State x;
    x.s = coin(0.05) ? 0.0 : uniform(0.0, scale);
    x.v = coin(0.05) ? 0.0 : uniform(0.0, scale / 4);
    x.r = coin(0.05) ? 0.0 : uniform(0.0, scale / 4);
    x.a_s = coin(0.05) ? 0.0 : uniform(0.0, scale / 4);
    x.r_s = coin(0.05) ? 0.0 : uniform(0.0, scale / 4);
    return x;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen
