#pragma once

// The order parameter D+ = sqrt(2) (tau+^dag sigma - sigma^dag tau-) and its
// graded powers. A GradedOperator of degree g maps sector l into sector l+g;
// blocks are keyed by the source sector.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "vibron/basis.hpp"
#include "vibron/quantum_state.hpp"

namespace vibron {

struct GradedOperator {
  int N = 0;
  int degree = 0;
  std::map<int, Eigen::MatrixXd> blocks;  // source l -> D_{l+g} x D_l

  bool is_zero() const { return blocks.empty(); }

  const Eigen::MatrixXd* block(int ell) const {
    auto it = blocks.find(ell);
    return it == blocks.end() ? nullptr : &it->second;
  }
};

/// Block of D+ from sector l to l+1 (ascending n+ ordering on both sides).
inline Eigen::MatrixXd dplus_block(int N, int ell) {
  const SectorBasis src = make_sector(N, ell);
  const SectorBasis dst = make_sector(N, ell + 1);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dst.size(), src.size());
  for (int j = 0; j < src.size(); ++j) {
    const auto [np, nm] = src.labels[j];
    const int ns = N - np - nm;
    if (ns > 0) {
      const int i = dst.index_of(np + 1, nm);
      if (i >= 0) m(i, j) += std::sqrt(2.0 * (np + 1) * ns);
    }
    if (nm > 0) {
      const int i = dst.index_of(np, nm - 1);
      if (i >= 0) m(i, j) -= std::sqrt(2.0 * nm * (ns + 1));
    }
  }
  return m;
}

inline GradedOperator dplus_operator(int N) {
  detail::require(N >= 1, "dplus_operator: N must be >= 1");
  GradedOperator op{N, 1, {}};
  for (int ell = -N; ell < N; ++ell) op.blocks.emplace(ell, dplus_block(N, ell));
  return op;
}

inline GradedOperator adjoint(const GradedOperator& op) {
  GradedOperator out{op.N, -op.degree, {}};
  for (const auto& [ell, b] : op.blocks) out.blocks.emplace(ell + op.degree, b.transpose());
  return out;
}

/// a * b (apply b first).
inline GradedOperator compose(const GradedOperator& a, const GradedOperator& b) {
  detail::require(a.N == b.N, "compose: boson numbers differ");
  GradedOperator out{a.N, a.degree + b.degree, {}};
  for (const auto& [ell, bb] : b.blocks) {
    if (const auto* ab = a.block(ell + b.degree)) out.blocks.emplace(ell, (*ab) * bb);
  }
  return out;
}

/// base^n by block-wise composition. Powers beyond the l range give the zero operator.
inline GradedOperator power_operator(const GradedOperator& base, int n) {
  detail::require(n >= 1, "power_operator: n must be >= 1, got " + std::to_string(n));
  GradedOperator out = base;
  for (int k = 1; k < n; ++k) out = compose(base, out);
  return out;
}

inline QuantumState apply(const GradedOperator& op, const QuantumState& psi) {
  detail::require(op.N == psi.N(), "apply: boson numbers differ");
  QuantumState out(psi.N());
  for (const auto& [ell, v] : psi.sectors()) {
    if (const auto* b = op.block(ell)) out.mutable_sector(ell + op.degree) += (*b) * v;
  }
  return out;
}

inline QuantumState apply_dplus(const QuantumState& psi, const ModelParams& params) {
  detail::require(params.N == psi.N(), "apply_dplus: boson numbers differ");
  return apply(dplus_operator(params.N), psi);
}

/// <psi| op |psi> (unnormalized).
inline cplx graded_expectation(const GradedOperator& op, const QuantumState& psi) {
  cplx s = 0.0;
  for (const auto& [ell, v] : psi.sectors()) {
    const auto* b = op.block(ell);
    if (!b || !psi.has(ell + op.degree)) continue;
    s += psi.sectors().at(ell + op.degree).dot((*b) * v);
  }
  return s;
}

/// (D+ D- + D- D+) / 2 restricted to sector l.
inline Eigen::MatrixXd dplus_dminus_symmetrized(int N, int ell) {
  const int d = sector_dimension(N, ell);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  if (ell < N) {
    const Eigen::MatrixXd up = dplus_block(N, ell);  // l -> l+1
    m += 0.5 * up.transpose() * up;                  // D- D+
  }
  if (ell > -N) {
    const Eigen::MatrixXd down = dplus_block(N, ell - 1);  // l-1 -> l
    m += 0.5 * down * down.transpose();                    // D+ D-
  }
  return m;
}

// ---------------------------------------------------------------------------
// Dense full-space views, used for small-N verification.

/// Offsets of each sector inside the concatenated (ascending l) full basis.
struct FullSpaceIndex {
  int N = 0;
  std::map<int, int> offset;
  int dim = 0;

  explicit FullSpaceIndex(int n) : N(n) {
    for (int ell = -N; ell <= N; ++ell) {
      offset[ell] = dim;
      dim += sector_dimension(N, ell);
    }
  }
};

inline Eigen::MatrixXd to_dense(const GradedOperator& op) {
  const FullSpaceIndex idx(op.N);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(idx.dim, idx.dim);
  for (const auto& [ell, b] : op.blocks)
    m.block(idx.offset.at(ell + op.degree), idx.offset.at(ell), b.rows(), b.cols()) = b;
  return m;
}

inline Eigen::VectorXcd to_dense(const QuantumState& psi) {
  const FullSpaceIndex idx(psi.N());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(idx.dim);
  for (const auto& [ell, a] : psi.sectors()) v.segment(idx.offset.at(ell), a.size()) = a;
  return v;
}

inline Eigen::VectorXd dense_L_diagonal(int N) {
  const FullSpaceIndex idx(N);
  Eigen::VectorXd d(idx.dim);
  for (int ell = -N; ell <= N; ++ell)
    d.segment(idx.offset.at(ell), sector_dimension(N, ell)).setConstant(ell);
  return d;
}

/// Max-norm of [G, L] + n * (D+)^n, relative to max|(D+)^n|. The reference power
/// is rebuilt by repeated application of D+ to basis vectors, independently of
/// the block composition that produced G.
inline double commutator_check(const GradedOperator& g, int n) {
  detail::require(n >= 1, "commutator_check: n must be >= 1");
  const int N = g.N;
  const FullSpaceIndex idx(N);
  const GradedOperator dp = dplus_operator(N);

  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(idx.dim, idx.dim);
  for (int ell = -N; ell <= N; ++ell) {
    const int d = sector_dimension(N, ell);
    for (int j = 0; j < d; ++j) {
      QuantumState e(N);
      e.mutable_sector(ell)[j] = 1.0;
      for (int k = 0; k < n; ++k) e = apply(dp, e);
      const Eigen::VectorXcd col = to_dense(e);
      ref.col(idx.offset.at(ell) + j) = col.real();
    }
  }

  const Eigen::MatrixXd G = to_dense(g);
  const Eigen::VectorXd L = dense_L_diagonal(N);
  const Eigen::MatrixXd comm = G * L.asDiagonal() - L.asDiagonal() * G;
  const double scale = std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
  return (comm + n * ref).cwiseAbs().maxCoeff() / scale;
}

}  // namespace vibron
