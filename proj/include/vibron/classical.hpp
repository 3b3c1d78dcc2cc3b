#pragma once

// Classical limit: energy functional on the phase-space ball, Hamilton
// equations, fixed-step RK4 trajectories and the classical order parameter.

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "vibron/error.hpp"
#include "vibron/phase_space.hpp"

namespace vibron {

struct ClassicalParams {
  double xi = 0.0;
  double mu = 0.0;

  void validate() const {
    detail::require(xi >= 0.0 && xi <= 1.0, "ClassicalParams: xi must lie in [0, 1]");
  }
};

/// Classical angular momentum, the limit of L/N.
inline double classical_ell(const PhasePoint& x) { return x.q1 * x.p2 - x.q2 * x.p1; }

inline double classical_energy_unchecked(const PhasePoint& x, const ClassicalParams& c) {
  const double w2 = x.omega2();
  const double Q = x.q1 * x.q1 + x.q2 * x.q2;
  const double J = x.p1 * x.q2 - x.p2 * x.q1;
  return 0.5 * (1.0 - c.xi) * w2 + c.xi * (1.0 - Q * (2.0 - w2) - J * J) + c.mu * (x.p2 * x.q1 - x.p1 * x.q2);
}

inline double classical_energy(const PhasePoint& x, const ClassicalParams& c) {
  x.validate(1e-9);
  return classical_energy_unchecked(x, c);
}

/// (dq1/dt, dp1/dt, dq2/dt, dp2/dt) = (dH/dp1, -dH/dq1, dH/dp2, -dH/dq2).
inline std::array<double, 4> hamilton_rhs(const PhasePoint& x, const ClassicalParams& c) {
  const double xi = c.xi, mu = c.mu;
  const double w2 = x.omega2();
  const double Q = x.q1 * x.q1 + x.q2 * x.q2;
  const double J = x.p1 * x.q2 - x.p2 * x.q1;
  const double dq1 = (1 - xi) * x.q1 + xi * (-2 * x.q1 * (2 - w2) + 2 * Q * x.q1 + 2 * J * x.p2) + mu * x.p2;
  const double dq2 = (1 - xi) * x.q2 + xi * (-2 * x.q2 * (2 - w2) + 2 * Q * x.q2 - 2 * J * x.p1) - mu * x.p1;
  const double dp1 = (1 - xi) * x.p1 + xi * (2 * Q * x.p1 - 2 * J * x.q2) - mu * x.q2;
  const double dp2 = (1 - xi) * x.p2 + xi * (2 * Q * x.p2 + 2 * J * x.q1) + mu * x.q1;
  return {dp1, -dq1, dp2, -dq2};
}

inline std::complex<double> classical_dplus(const PhasePoint& x) {
  x.validate(1e-9);
  return -std::sqrt(std::max(0.0, 2.0 - x.omega2())) * std::complex<double>(x.q1, x.q2);
}

struct Trajectory {
  ClassicalParams params;
  std::vector<double> times;
  std::vector<PhasePoint> points;
};

struct IntegrationOptions {
  double dt = 1e-3;
  int stride = 1000;            // keep every stride-th step
  double energy_tol = 1e-8;     // |H(t) - H(0)|
  double ell_tol = 1e-8;        // |l_cl(t) - l_cl(0)|
  double radius_slack = 1e-9;   // Omega^2 <= 2 + slack
};

/// Fixed-step classical RK4. Any tolerance breach aborts with a diagnostic.
inline Trajectory integrate(const PhasePoint& x0, const ClassicalParams& c, double t_end,
                            const IntegrationOptions& opt = {}) {
  c.validate();
  x0.validate();
  detail::require(opt.dt > 0.0, "integrate: dt must be positive");
  detail::require(opt.stride >= 1, "integrate: stride must be >= 1");
  detail::require(t_end >= 0.0, "integrate: t_end must be non-negative");

  const double e0 = classical_energy(x0, c);
  const double l0 = classical_ell(x0);
  auto shift = [](const PhasePoint& x, const std::array<double, 4>& k, double h) {
    return PhasePoint{x.q1 + h * k[0], x.p1 + h * k[1], x.q2 + h * k[2], x.p2 + h * k[3]};
  };

  Trajectory tr{c, {0.0}, {x0}};
  PhasePoint x = x0;
  const long steps = std::lround(t_end / opt.dt);
  for (long s = 1; s <= steps; ++s) {
    const auto k1 = hamilton_rhs(x, c);
    const auto k2 = hamilton_rhs(shift(x, k1, 0.5 * opt.dt), c);
    const auto k3 = hamilton_rhs(shift(x, k2, 0.5 * opt.dt), c);
    const auto k4 = hamilton_rhs(shift(x, k3, opt.dt), c);
    std::array<double, 4> k;
    for (int i = 0; i < 4; ++i) k[i] = (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) / 6.0;
    x = shift(x, k, opt.dt);
    const double t = s * opt.dt;

    const double de = std::abs(classical_energy_unchecked(x, c) - e0);
    const double dl = std::abs(classical_ell(x) - l0);
    if (de > opt.energy_tol || dl > opt.ell_tol || x.omega2() > 2.0 + opt.radius_slack) {
      std::ostringstream msg;
      msg << "integrate: tolerance breach at t=" << t << " (|dE|=" << de << ", |dl|=" << dl
          << ", Omega^2=" << x.omega2() << ", dt=" << opt.dt << ")";
      throw NumericalError(msg.str());
    }
    if (s % opt.stride == 0 || s == steps) {
      tr.times.push_back(t);
      tr.points.push_back(x);
    }
  }
  return tr;
}

/// D+^n along a trajectory.
inline std::vector<std::complex<double>> classical_dplus_power(const Trajectory& tr, int n) {
  detail::require(n >= 1, "classical_dplus_power: n must be >= 1");
  std::vector<std::complex<double>> out;
  out.reserve(tr.points.size());
  for (const auto& x : tr.points) {
    const std::complex<double> d = classical_dplus(x);
    std::complex<double> p = d;
    for (int k = 1; k < n; ++k) p *= d;
    out.push_back(p);
  }
  return out;
}

}  // namespace vibron
