#pragma once

// H_mu = (1-xi) n_tau + xi/(N-1) P + mu L, block diagonal in l.
// P = N^2 - L^2 - (D+ D- + D- D+)/2 is assembled from the ladder blocks.

#include <Eigen/Dense>
#include <map>
#include <stdexcept>

#include "vibron/basis.hpp"
#include "vibron/error.hpp"
#include "vibron/ladder_ops.hpp"

namespace vibron {

struct BlockHamiltonian {
  ModelParams params;
  std::map<int, Eigen::MatrixXd> blocks;

  int N() const { return params.N; }
  long dimension() const {
    long d = 0;
    for (const auto& [ell, b] : blocks) d += b.rows();
    return d;
  }
};

inline Eigen::MatrixXd build_sector(const ModelParams& params, int ell) {
  params.validate();
  const int N = params.N;
  detail::require(std::abs(ell) <= N, "build_sector: |l| exceeds N");
  const SectorBasis basis = make_sector(N, ell);
  const int d = basis.size();

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) h(i, i) = (1.0 - params.xi) * basis.labels[i].n_tau() + params.mu * ell;

  if (params.xi != 0.0) {
    Eigen::MatrixXd p = -dplus_dminus_symmetrized(N, ell);
    p.diagonal().array() += double(N) * N - double(ell) * ell;
    h += params.xi / (N - 1.0) * p;
  }
  // Remove rounding asymmetry so downstream solvers see an exactly symmetric block.
  return 0.5 * (h + h.transpose());
}

inline BlockHamiltonian build_hamiltonian(const ModelParams& params) {
  params.validate();
  BlockHamiltonian h{params, {}};
  for (int ell = -params.N; ell <= params.N; ++ell) h.blocks.emplace(ell, build_sector(params, ell));
  return h;
}

/// Large-N ground-state energy per particle.
inline double gs_energy_analytic(double xi) {
  detail::require(xi >= 0.0 && xi <= 1.0, "gs_energy_analytic: xi must lie in [0, 1]");
  if (xi <= 0.2) return xi;
  return (-1.0 + 10.0 * xi - 9.0 * xi * xi) / (16.0 * xi);
}

/// ESQPT critical energy per particle; only defined in the broken phase.
inline double esqpt_energy(double xi) {
  detail::require(xi >= 0.2 && xi <= 1.0, "esqpt_energy: no ESQPT for xi < 1/5");
  return xi;
}

}  // namespace vibron
