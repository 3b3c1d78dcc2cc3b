#pragma once

// Hermitian parts of (D+)^n:
//   X_n = ((D+)^n + (D-)^n) / 2,   Y_n = ((D+)^n - (D-)^n) / (2i).

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "vibron/ladder_ops.hpp"

namespace vibron {

enum class ObservableKind { X, Y };

inline char sign_label(ObservableKind k) { return k == ObservableKind::X ? 'C' : 'K'; }

struct HermitianObservable {
  ObservableKind kind = ObservableKind::X;
  int n = 1;
  GradedOperator power;  // (D+)^n

  int N() const { return power.N; }

  QuantumState apply(const QuantumState& psi) const {
    const QuantumState up = vibron::apply(power, psi);
    const QuantumState down = vibron::apply(adjoint(power), psi);
    QuantumState out(psi.N());
    const cplx a = kind == ObservableKind::X ? cplx(0.5, 0.0) : cplx(0.0, -0.5);
    const cplx b = kind == ObservableKind::X ? cplx(0.5, 0.0) : cplx(0.0, 0.5);
    for (const auto& [ell, v] : up.sectors()) out.mutable_sector(ell) += a * v;
    for (const auto& [ell, v] : down.sectors()) out.mutable_sector(ell) += b * v;
    return out;
  }

  double expectation(const QuantumState& psi) const {
    return inner(psi, apply(psi)).real() / psi.squared_norm();
  }

  /// Sectors l with l = r (mod n), ascending.
  std::vector<int> residue_sectors(int r) const {
    std::vector<int> out;
    for (int ell = -N(); ell <= N(); ++ell)
      if (((ell % n) + n) % n == r) out.push_back(ell);
    return out;
  }

  /// Dense matrix on the residue class l = r (mod n).
  Eigen::MatrixXcd residue_block(int r) const {
    const std::vector<int> ells = residue_sectors(r);
    std::map<int, int> off;
    int dim = 0;
    for (int ell : ells) {
      off[ell] = dim;
      dim += sector_dimension(N(), ell);
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    const cplx up = kind == ObservableKind::X ? cplx(0.5, 0.0) : cplx(0.0, -0.5);
    for (const auto& [ell, b] : power.blocks) {
      if (!off.count(ell) || !off.count(ell + n)) continue;
      const int i = off[ell + n], j = off[ell];
      m.block(i, j, b.rows(), b.cols()) += up * b.cast<cplx>();
      m.block(j, i, b.cols(), b.rows()) += std::conj(up) * b.transpose().cast<cplx>();
    }
    return m;
  }

  Eigen::MatrixXcd dense() const {
    const Eigen::MatrixXcd p = to_dense(power).cast<cplx>();
    if (kind == ObservableKind::X) return 0.5 * (p + p.adjoint());
    return cplx(0.0, -0.5) * (p - p.adjoint());
  }
};

inline HermitianObservable make_observable(ObservableKind kind, int n, int N) {
  detail::require(n >= 1, "observable power n must be >= 1");
  return {kind, n, power_operator(dplus_operator(N), n)};
}

inline std::pair<HermitianObservable, HermitianObservable> build_xy(int n, const ModelParams& params) {
  detail::require(n >= 1, "build_xy: n must be >= 1, got " + std::to_string(n));
  params.validate();
  const GradedOperator p = power_operator(dplus_operator(params.N), n);
  return {HermitianObservable{ObservableKind::X, n, p}, HermitianObservable{ObservableKind::Y, n, p}};
}

}  // namespace vibron
