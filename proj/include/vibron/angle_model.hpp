#pragma once

// Gaussian angle distributions rho(alpha) with sigma^2 = a/N and the sign
// expectations they predict: <C_n> = E[sign cos(n alpha)], <K_n> = E[sign sin(n alpha)].

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "vibron/error.hpp"
#include "vibron/observables.hpp"

namespace vibron {

struct MixtureComponent {
  double mean = 0.0;  // radians
  double weight = 1.0;
};

/// Components share one width law sigma^2 = a/N. a = 0 is the delta limit.
struct GaussianMixture {
  std::vector<MixtureComponent> components;
  double a = 0.5;
  double N = 100.0;

  void validate() const {
    detail::require(!components.empty(), "GaussianMixture: no components");
    double s = 0.0;
    for (const auto& c : components) {
      detail::require(c.weight > 0.0, "GaussianMixture: weights must be positive");
      s += c.weight;
    }
    detail::require(std::abs(s - 1.0) < 1e-12, "GaussianMixture: weights must sum to 1");
    detail::require(a >= 0.0, "GaussianMixture: a must be non-negative");
    detail::require(N > 0.0, "GaussianMixture: N must be positive");
  }

  double sigma() const { return std::sqrt(a / N); }

  static GaussianMixture single(double mean, double a, double N) { return {{{mean, 1.0}}, a, N}; }

  /// Means at mean, mean + 2pi/3, mean + 4pi/3 with equal weights.
  static GaussianMixture three_fold(double mean, double a, double N) {
    const double step = 2.0 * std::numbers::pi / 3.0;
    return {{{mean, 1.0 / 3}, {mean + step, 1.0 / 3}, {mean + 2 * step, 1.0 / 3}}, a, N};
  }
};

namespace detail {

// P(lo < Z < hi) for a standard normal, accurate in both tails.
inline double normal_mass(double lo, double hi) {
  if (lo >= 0.0) return 0.5 * (std::erfc(lo / std::numbers::sqrt2) - std::erfc(hi / std::numbers::sqrt2));
  if (hi <= 0.0) return 0.5 * (std::erfc(-hi / std::numbers::sqrt2) - std::erfc(-lo / std::numbers::sqrt2));
  return 1.0 - 0.5 * std::erfc(-lo / std::numbers::sqrt2) - 0.5 * std::erfc(hi / std::numbers::sqrt2);
}

inline double sign_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// E[sign f(beta)] for beta ~ N(m, s^2), f = cos or sin. Sign changes sit at
// offset + j pi; the sign on (offset + j pi, offset + (j+1) pi) alternates.
inline double gaussian_sign_expectation(double m, double s, ObservableKind kind) {
  const double pi = std::numbers::pi;
  const double offset = kind == ObservableKind::X ? -0.5 * pi : 0.0;
  auto f = [&](double b) { return kind == ObservableKind::X ? std::cos(b) : std::sin(b); };
  if (s == 0.0) return sign_of(f(m));

  const double reach = 8.0 * s;
  const long j_lo = static_cast<long>(std::ceil((m - reach - offset) / pi));
  const long j_hi = static_cast<long>(std::floor((m + reach - offset) / pi));
  if (j_lo > j_hi) return sign_of(f(m));  // no sign change inside +-8 sigma

  double total = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  for (long j = j_lo; j <= j_hi + 1; ++j) {
    const double hi = j <= j_hi ? offset + j * pi : std::numeric_limits<double>::infinity();
    // Sign on (lo, hi): evaluate f just left of the boundary.
    const double mid = std::isfinite(hi) ? hi - 0.5 * pi : offset + (j_hi + 0.5) * pi;
    const double zl = std::isfinite(lo) ? (lo - m) / s : -std::numeric_limits<double>::infinity();
    const double zh = std::isfinite(hi) ? (hi - m) / s : std::numeric_limits<double>::infinity();
    total += sign_of(f(mid)) * normal_mass(zl, zh);
    lo = hi;
  }
  return total;
}

}  // namespace detail

/// Closed form, alternating sum of normal masses between sign changes.
inline double predict_sign_expectation(const GaussianMixture& mix, int n, ObservableKind kind) {
  mix.validate();
  detail::require(n >= 1, "predict_sign_expectation: n must be >= 1");
  const double s = n * mix.sigma();
  double v = 0.0;
  for (const auto& c : mix.components) v += c.weight * detail::gaussian_sign_expectation(n * c.mean, s, kind);
  return std::clamp(v, -1.0, 1.0);
}

struct SignTarget {
  int n = 2;
  ObservableKind kind = ObservableKind::X;
  double value = -0.293;
};

struct Calibration {
  double a = 0.0;
  double residual = 0.0;
  bool at_lower_edge = false;  // target equals the delta-limit value
};

/// Bisection for a on (0, a_max] such that the prediction hits the target.
/// `mix.a` is ignored.
inline Calibration calibrate_a(const SignTarget& target, GaussianMixture mix, double a_max = 10.0) {
  auto f = [&](double a) {
    mix.a = a;
    return predict_sign_expectation(mix, target.n, target.kind) - target.value;
  };
  const double f0 = f(0.0);
  if (std::abs(f0) < 1e-9) return {0.0, f0, true};
  double lo = 0.0, hi = a_max, flo = f0, fhi = f(hi);
  if (flo * fhi > 0.0)
    throw std::invalid_argument("calibrate_a: target " + std::to_string(target.value) +
                                " not bracketed on (0, " + std::to_string(a_max) + "]");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return {mid, 0.0, false};
    if ((fm < 0) == (flo < 0)) lo = mid, flo = fm;
    else hi = mid, fhi = fm;
  }
  const double a = std::abs(flo) < std::abs(fhi) ? lo : hi;
  const double r = f(a);
  if (!(std::abs(r) < 1e-9))
    throw NumericalError("calibrate_a: bisection stalled with residual " + std::to_string(r) +
                         " (prediction not continuous near the target)");
  return {a, r, false};
}

/// Predictions at each N with the template's a held fixed.
inline std::vector<std::pair<int, double>> predict_scaling_curve(GaussianMixture mix, int n, ObservableKind kind,
                                                                 const std::vector<int>& Ns) {
  std::vector<std::pair<int, double>> out;
  for (int N : Ns) {
    mix.N = N;
    out.emplace_back(N, predict_sign_expectation(mix, n, kind));
  }
  return out;
}

}  // namespace vibron
