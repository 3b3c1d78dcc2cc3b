#pragma once

// Canonical coordinates on the classical phase space (a ball of radius^2 2)
// and the Holstein-Primakoff amplitudes alpha+/- used by coherent states.

#include <cmath>
#include <complex>
#include <string>

#include "vibron/error.hpp"

namespace vibron {

struct PhasePoint {
  double q1 = 0.0;
  double p1 = 0.0;
  double q2 = 0.0;
  double p2 = 0.0;

  double omega2() const { return q1 * q1 + p1 * p1 + q2 * q2 + p2 * p2; }

  void validate(double slack = 0.0) const {
    if (!(omega2() <= 2.0 + slack))
      throw std::invalid_argument("PhasePoint: Omega^2 = " + std::to_string(omega2()) +
                                  " exceeds 2");
  }
};

inline std::complex<double> alpha_plus(const PhasePoint& x) {
  return {-0.5 * (x.q1 + x.p2), 0.5 * (x.q2 - x.p1)};
}

inline std::complex<double> alpha_minus(const PhasePoint& x) {
  return {0.5 * (x.q1 - x.p2), 0.5 * (x.p1 + x.q2)};
}

/// Radius^2 of the circle of classical minima; zero in the symmetric phase.
inline double ground_radius(double xi) {
  detail::require(xi >= 0.0 && xi <= 1.0, "ground_radius: xi must lie in [0, 1]");
  return xi <= 0.2 ? 0.0 : (5.0 * xi - 1.0) / (4.0 * xi);
}

/// Fix q1, take q2 = +sqrt(R^2 - q1^2), p = 0.
inline PhasePoint manifold_point(double xi, double q1) {
  const double r2 = ground_radius(xi);
  detail::require(q1 * q1 <= r2, "manifold_point: q1^2 exceeds R^2(xi) = " + std::to_string(r2));
  return PhasePoint{q1, 0.0, std::sqrt(r2 - q1 * q1), 0.0};
}

}  // namespace vibron
