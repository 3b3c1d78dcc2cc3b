#pragma once

// Sudden-quench dynamics by spectral phases: expand the initial state in the
// final Hamiltonian's eigenbasis once, then every time sample is a phase
// multiplication. Sign operators are evaluated in multiplet coordinates through
// T_l = U_l^T V_l, which maps eigen-coefficients to W-eigenbasis coordinates.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "vibron/irreps.hpp"
#include "vibron/ladder_ops.hpp"
#include "vibron/observables.hpp"
#include "vibron/sign_operator.hpp"
#include "vibron/spectral.hpp"
#include "vibron/states.hpp"

namespace vibron {

struct TimeGrid {
  double start = 0.0;
  double stop = 5e3;
  double step = 0.5;

  void validate() const {
    detail::require(step > 0.0, "TimeGrid: step must be positive");
    detail::require(stop >= start, "TimeGrid: stop precedes start");
  }
  std::vector<double> times() const {
    validate();
    std::vector<double> t;
    const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= n; ++k) t.push_back(start + k * step);
    return t;
  }
};

struct QuenchSpec {
  ModelParams initial;
  ModelParams final_;
  StateRecipe state;
  TimeGrid grid;
  double zero_tol = kDefaultZeroTol;
};

struct TimeSeries {
  std::string descriptor;
  std::vector<double> times;
  std::vector<cplx> values;

  std::size_t size() const { return times.size(); }
  void push(double t, cplx v) {
    detail::require(times.empty() || t > times.back(), "TimeSeries: times must increase");
    times.push_back(t);
    values.push_back(v);
  }
};

struct PrethermalizationEstimate {
  double tau_star = 0.0;
  double gamma = 5e-3;
  bool resolved = false;
};

inline constexpr double kDefaultGamma = 5e-3;

/// Spectra of the sectors in `ells` only.
inline Spectra diagonalize_sectors(const ModelParams& p, const std::set<int>& ells) {
  Spectra out;
  for (int ell : ells) out.emplace(ell, diagonalize_block(ell, build_sector(p, ell)));
  return out;
}

/// c_n^l = <E_n^l|psi>, per sector.
inline std::map<int, Eigen::VectorXcd> expand_in_eigenbasis(const QuantumState& psi, const Spectra& spectra) {
  psi.require_normalized(1e-10);
  std::map<int, Eigen::VectorXcd> c;
  double total = 0.0;
  for (const auto& [ell, v] : psi.sectors()) {
    auto it = spectra.find(ell);
    if (it == spectra.end()) {
      if (v.squaredNorm() == 0.0) continue;
      throw std::invalid_argument("expand_in_eigenbasis: no spectrum for sector l=" + std::to_string(ell));
    }
    detail::require(it->second.size() == v.size(), "expand_in_eigenbasis: dimension mismatch");
    c[ell] = it->second.eigenvectors.transpose() * v;
    total += c[ell].squaredNorm();
  }
  if (!(std::abs(total - 1.0) <= 1e-10))
    throw NumericalError("expand_in_eigenbasis: sum |c|^2 = " + std::to_string(total));
  return c;
}

/// Exact-phase evolution of one initial state under one final Hamiltonian.
class QuenchEvolver {
 public:
  QuenchEvolver(const ModelParams& final_params, const QuantumState& psi0)
      : params_(final_params), N_(psi0.N()) {
    final_params.validate();
    detail::require(final_params.N == psi0.N(), "QuenchEvolver: boson numbers differ");
    support_ = psi0.support();
    spectra_ = diagonalize_sectors(final_params, support_);
    coeffs_ = expand_in_eigenbasis(psi0, spectra_);
  }

  int N() const { return N_; }
  const ModelParams& params() const { return params_; }
  const std::set<int>& support() const { return support_; }
  const Spectra& spectra() const { return spectra_; }
  const std::map<int, Eigen::VectorXcd>& coefficients() const { return coeffs_; }

  std::map<int, Eigen::VectorXcd> phased(double t) const {
    std::map<int, Eigen::VectorXcd> out;
    for (const auto& [ell, c] : coeffs_) {
      const Eigen::VectorXd& e = spectra_.at(ell).eigenvalues;
      Eigen::VectorXcd v(c.size());
      for (int k = 0; k < c.size(); ++k) v[k] = c[k] * std::polar(1.0, -e[k] * t);
      out.emplace(ell, std::move(v));
    }
    return out;
  }

  QuantumState state_at(double t) const {
    QuantumState psi(N_);
    for (const auto& [ell, v] : phased(t))
      psi.set_sector(ell, spectra_.at(ell).eigenvectors.cast<cplx>() * v);
    return psi;
  }

  /// <psi(t)| G |psi(t)> for a graded operator.
  cplx graded(const GradedOperator& g, double t) const { return graded_expectation(g, state_at(t)); }

  double angular_momentum(double t) const { return expectation_L(state_at(t)); }

  /// <H_f> evaluated from the evolved amplitudes and the Hamiltonian blocks.
  double energy(double t) const {
    const QuantumState psi = state_at(t);
    double e = 0.0;
    for (const auto& [ell, v] : psi.sectors()) e += v.dot(build_sector(params_, ell) * v).real();
    return e;
  }

  /// Sign-operator expectation as a function of time.
  std::function<SignProbabilities(double)> sign_tracker(const SignOperator& s) const {
    detail::require(s.N() == N_, "sign_tracker: boson numbers differ");
    const auto& T = transfer(s.basis());
    auto restricted = std::make_shared<const SignOperator::Restricted>(s.restrict_to(support_));
    return [this, &T, restricted](double t) {
      std::map<int, Eigen::VectorXcd> coords;
      for (const auto& [ell, v] : phased(t)) coords.emplace(ell, T.at(ell) * v);
      return restricted->probabilities(coords);
    };
  }

 private:
  const std::map<int, Eigen::MatrixXcd>& transfer(const IrrepBasis& b) const {
    if (transfer_.empty())
      for (int ell : support_)
        transfer_.emplace(ell, (b.sector_basis(ell).transpose() * spectra_.at(ell).eigenvectors).cast<cplx>());
    return transfer_;
  }

  ModelParams params_;
  int N_;
  std::set<int> support_;
  Spectra spectra_;
  std::map<int, Eigen::VectorXcd> coeffs_;
  mutable std::map<int, Eigen::MatrixXcd> transfer_;
};

inline TimeSeries sample(const std::string& descriptor, const std::vector<double>& times,
                         const std::function<cplx(double)>& f) {
  TimeSeries s{descriptor, {}, {}};
  for (double t : times) s.push(t, f(t));
  return s;
}

inline TimeSeries evolve_expectation(const QuenchEvolver& ev, const GradedOperator& g,
                                     const std::vector<double>& times) {
  return sample("D+^" + std::to_string(g.degree), times, [&](double t) { return ev.graded(g, t); });
}

inline TimeSeries evolve_expectation(const QuenchEvolver& ev, const HermitianObservable& obs,
                                     const std::vector<double>& times) {
  const std::string name = std::string(obs.kind == ObservableKind::X ? "X" : "Y") + std::to_string(obs.n);
  return sample(name, times, [&](double t) { return cplx(obs.expectation(ev.state_at(t)), 0.0); });
}

inline TimeSeries evolve_expectation(const QuenchEvolver& ev, const SignOperator& s,
                                     const std::vector<double>& times) {
  const auto f = ev.sign_tracker(s);
  return sample(s.label(), times, [&](double t) { return cplx(f(t).expectation(), 0.0); });
}

inline TimeSeries evolve_angular_momentum(const QuenchEvolver& ev, const std::vector<double>& times) {
  return sample("L", times, [&](double t) { return cplx(ev.angular_momentum(t), 0.0); });
}

inline TimeSeries evolve_energy(const QuenchEvolver& ev, const std::vector<double>& times) {
  return sample("H", times, [&](double t) { return cplx(ev.energy(t), 0.0); });
}

inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w < 0) w += two_pi;
  if (w >= two_pi) w -= two_pi;
  return w;
}

/// Shortest signed distance between two angles, in [-pi, pi).
inline double circular_difference(double a, double b) {
  return wrap_angle(a - b + std::numbers::pi) - std::numbers::pi;
}

struct AngleSeries {
  TimeSeries wrapped;    // alpha_n(t) in [0, 2pi)
  TimeSeries unwrapped;  // continuous branch starting at wrapped[0]
  std::vector<double> modulus;
  std::vector<double> undefined_at;  // times where |<D+^n>| < 1e-12
};

inline AngleSeries angle_series(const QuenchEvolver& ev, int n, const std::vector<double>& times) {
  detail::require(n >= 1, "angle_series: n must be >= 1");
  const GradedOperator g = power_operator(dplus_operator(ev.N()), n);
  AngleSeries out;
  out.wrapped.descriptor = "alpha" + std::to_string(n);
  out.unwrapped.descriptor = "alpha" + std::to_string(n) + "_unwrapped";
  double prev = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const cplx d = ev.graded(g, times[k]);
    const double m = std::abs(d);
    if (m < 1e-12) out.undefined_at.push_back(times[k]);
    const double a = wrap_angle(std::arg(d));
    const double u = k == 0 ? a : prev + circular_difference(a, prev);
    out.wrapped.push(times[k], a);
    out.unwrapped.push(times[k], u);
    out.modulus.push_back(m);
    prev = u;
  }
  if (!times.empty() && !out.undefined_at.empty() && out.undefined_at.front() == times.front())
    throw std::invalid_argument("angle_series: <D+^n(0)> vanishes, angle undefined");
  return out;
}

enum class Distance { Linear, Circular };

inline double departure(cplx v, cplx v0, Distance d) {
  return d == Distance::Linear ? std::abs(v - v0) : std::abs(circular_difference(v.real(), v0.real()));
}

/// First sampled time with |v(t) - v(0)| > gamma.
inline PrethermalizationEstimate tau_star(const TimeSeries& s, double gamma = kDefaultGamma,
                                          Distance dist = Distance::Linear) {
  detail::require(s.size() > 0, "tau_star: empty series");
  PrethermalizationEstimate e{s.times.back(), gamma, false};
  for (std::size_t k = 1; k < s.size(); ++k)
    if (departure(s.values[k], s.values[0], dist) > gamma) return {s.times[k], gamma, true};
  return e;
}

/// Lazy search: scan a coarse grid until the first crossing, then rescan the
/// bracketing interval `levels` times with a ten times finer step.
inline PrethermalizationEstimate tau_star_search(const std::function<double(double)>& f, const TimeGrid& grid,
                                                 double gamma = kDefaultGamma, int levels = 2,
                                                 Distance dist = Distance::Linear) {
  grid.validate();
  const double v0 = f(grid.start);
  auto crossed = [&](double t) { return departure(f(t), v0, dist) > gamma; };

  double lo = grid.start, step = grid.step, hit = 0.0;
  bool found = false;
  const long n = static_cast<long>(std::floor((grid.stop - grid.start) / step + 1e-9));
  for (long k = 1; k <= n; ++k) {
    const double t = grid.start + k * step;
    if (crossed(t)) {
      hit = t;
      lo = t - step;
      found = true;
      break;
    }
  }
  if (!found) return {grid.stop, gamma, false};

  for (int level = 0; level < levels; ++level) {
    const double fine = step / 10.0;
    for (int k = 1; k <= 10; ++k) {
      const double t = lo + k * fine;
      if (k == 10 || crossed(t)) {
        hit = t;
        lo = t - fine;
        break;
      }
    }
    step = fine;
  }
  return {hit, gamma, true};
}

/// Mean of f over an evenly spaced grid [0, horizon].
inline cplx longtime_average(const std::function<cplx(double)>& f, double horizon, double step) {
  detail::require(horizon > 0.0 && step > 0.0, "longtime_average: horizon and step must be positive");
  const long n = static_cast<long>(std::floor(horizon / step + 1e-9));
  cplx s = 0.0;
  for (long k = 0; k <= n; ++k) s += f(k * step);
  return s / double(n + 1);
}

}  // namespace vibron
