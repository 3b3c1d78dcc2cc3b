#pragma once

// Seeded Monte-Carlo estimate of the angle-model sign expectations. Only used
// as an oracle for the closed form.

#include <cmath>
#include <cstdint>
#include <random>

#include "vibron/angle_model.hpp"

namespace vibron {

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MonteCarloEstimate monte_carlo_sign_expectation(const GaussianMixture& mix, int n, ObservableKind kind,
                                                       long samples, std::uint64_t seed) {
  mix.validate();
  detail::require(samples > 1, "monte_carlo_sign_expectation: need at least 2 samples");
  std::mt19937_64 rng(seed);
  detail::require(mix.a > 0.0, "monte_carlo_sign_expectation: a must be positive");
  std::normal_distribution<double> gauss(0.0, mix.sigma());
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& c : mix.components) cdf.push_back(acc += c.weight);
  std::uniform_real_distribution<double> pick(0.0, acc);

  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < samples; ++i) {
    const double u = pick(rng);
    std::size_t k = 0;
    while (k + 1 < cdf.size() && u > cdf[k]) ++k;
    const double alpha = mix.components[k].mean + gauss(rng);
    const double v = detail::sign_of(kind == ObservableKind::X ? std::cos(n * alpha) : std::sin(n * alpha));
    sum += v;
    sum2 += v * v;
  }
  const double m = sum / samples;
  const double var = std::max(0.0, sum2 / samples - m * m);
  return {m, std::sqrt(var / (samples - 1))};
}

}  // namespace vibron
