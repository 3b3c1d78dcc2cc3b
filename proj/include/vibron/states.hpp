#pragma once

// State constructors: Holstein-Primakoff coherent states, l-truncations,
// rotations R(alpha) = exp(i alpha L) and renormalized superpositions.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <set>
#include <vector>

#include "vibron/basis.hpp"
#include "vibron/phase_space.hpp"
#include "vibron/quantum_state.hpp"

namespace vibron {

/// Amplitudes N^{(n+ + n-)/2} a+^{n+} a-^{n-} / sqrt(n+! n-!), evaluated in log
/// space and normalized. The |0,0> amplitude is real and positive.
inline QuantumState coherent_state(int N, const PhasePoint& point) {
  detail::require(N >= 1, "coherent_state: N must be >= 1");
  point.validate();
  const cplx ap = alpha_plus(point), am = alpha_minus(point);
  const double lap = std::abs(ap) > 0 ? std::log(std::abs(ap)) : -std::numeric_limits<double>::infinity();
  const double lam = std::abs(am) > 0 ? std::log(std::abs(am)) : -std::numeric_limits<double>::infinity();
  const double php = std::arg(ap), phm = std::arg(am);
  const double logN = std::log(double(N));

  auto log_mod = [&](int np, int nm) {
    double s = 0.5 * (np + nm) * logN - 0.5 * (std::lgamma(np + 1.0) + std::lgamma(nm + 1.0));
    if (np > 0) s += np * lap;
    if (nm > 0) s += nm * lam;
    return s;
  };

  double peak = -std::numeric_limits<double>::infinity();
  for (int np = 0; np <= N; ++np)
    for (int nm = 0; np + nm <= N; ++nm) peak = std::max(peak, log_mod(np, nm));

  QuantumState psi(N);
  for (int ell = -N; ell <= N; ++ell) {
    const SectorBasis b = make_sector(N, ell);
    Eigen::VectorXcd v(b.size());
    bool any = false;
    for (int i = 0; i < b.size(); ++i) {
      const auto& f = b.labels[i];
      const double lm = log_mod(f.n_plus, f.n_minus) - peak;
      v[i] = std::isfinite(lm) ? std::polar(std::exp(lm), f.n_plus * php + f.n_minus * phm) : cplx(0.0);
      any = any || v[i] != cplx(0.0);
    }
    if (any) psi.set_sector(ell, std::move(v));
  }
  return psi.normalized();
}

/// Zero every sector outside `keep` and renormalize.
inline QuantumState truncate_sectors(const QuantumState& psi, const std::set<int>& keep) {
  detail::require(!keep.empty(), "truncate_sectors: keep set is empty");
  QuantumState out(psi.N());
  for (const auto& [ell, v] : psi.sectors())
    if (keep.count(ell)) out.set_sector(ell, v);
  if (!(out.squared_norm() > 0.0))
    throw std::invalid_argument("truncate_sectors: no norm survives the truncation");
  return out.normalized();
}

inline QuantumState rotate(const QuantumState& psi, double alpha) {
  QuantumState out(psi.N());
  for (const auto& [ell, v] : psi.sectors())
    out.set_sector(ell, v * std::polar(1.0, alpha * ell));
  return out;
}

/// sum_k w_k |psi_k>, renormalized with the actual overlaps.
inline QuantumState superpose(const std::vector<QuantumState>& states, const std::vector<cplx>& weights) {
  detail::require(!states.empty(), "superpose: no states");
  detail::require(states.size() == weights.size(), "superpose: weight count mismatch");
  const int N = states.front().N();
  QuantumState out(N);
  for (std::size_t k = 0; k < states.size(); ++k) {
    detail::require(states[k].N() == N, "superpose: boson numbers differ");
    for (const auto& [ell, v] : states[k].sectors()) {
      if (out.has(ell)) out.mutable_sector(ell) += weights[k] * v;
      else out.set_sector(ell, weights[k] * v);
    }
  }
  if (!(out.norm() > 1e-14))
    throw std::invalid_argument("superpose: the superposition has zero norm");
  return out.normalized();
}

/// (|C> + R(2pi/3)|C> + R(4pi/3)|C>) / sqrt 3, renormalized.
inline QuantumState three_fold_superposition(const QuantumState& classical) {
  const double step = 2.0 * std::numbers::pi / 3.0;
  const cplx w = 1.0 / std::sqrt(3.0);
  return superpose({classical, rotate(classical, step), rotate(classical, 2.0 * step)}, {w, w, w});
}

enum class StateKind { Coherent, Truncated, RotatedSuperposition };

/// Declarative state description used by quench and table runs. The coherent
/// state sits on the ground manifold of `xi` at the given q1 (p = 0).
struct StateRecipe {
  StateKind kind = StateKind::Coherent;
  double xi = 0.6;
  double q1 = -0.63;
  std::set<int> keep{0, 1, 2, 3, 4, 5};  // Truncated only
};

inline QuantumState prepare_state(const StateRecipe& r, int N) {
  const QuantumState c = coherent_state(N, manifold_point(r.xi, r.q1));
  switch (r.kind) {
    case StateKind::Coherent: return c;
    case StateKind::Truncated: return truncate_sectors(c, r.keep);
    case StateKind::RotatedSuperposition: return three_fold_superposition(c);
  }
  throw std::invalid_argument("prepare_state: unknown state kind");
}

}  // namespace vibron
