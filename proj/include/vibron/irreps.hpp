#pragma once

// W = L^2 + (D+ D- + D- D+)/2 commutes with D+, D- and L. Its eigenvalues are
// w(w+1) with w = N, N-2, ..., and each w appears exactly once in every sector
// |l| <= w. In the W eigenbasis, D+ acts inside (2w+1)-dimensional multiplets,
// which is what keeps the sign-operator eigenproblems small.

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "vibron/error.hpp"
#include "vibron/ladder_ops.hpp"

namespace vibron {

class IrrepBasis {
 public:
  explicit IrrepBasis(int N) : N_(N) {
    detail::require(N >= 1, "IrrepBasis: N must be >= 1");
    for (int ell = -N; ell <= N; ++ell) {
      Eigen::MatrixXd w = dplus_dminus_symmetrized(N, ell);
      w.diagonal().array() += double(ell) * ell;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
      if (es.info() != Eigen::Success)
        throw NumericalError("IrrepBasis: eigensolver failed in sector l=" + std::to_string(ell));
      const int w0 = min_weight(ell);
      for (int j = 0; j < es.eigenvalues().size(); ++j) {
        const double om = w0 + 2.0 * j;
        const double expected = om * (om + 1.0);
        if (std::abs(es.eigenvalues()[j] - expected) > 1e-8 * (1.0 + expected))
          throw NumericalError("IrrepBasis: unexpected Casimir eigenvalue " +
                               std::to_string(es.eigenvalues()[j]) + " in sector l=" +
                               std::to_string(ell));
      }
      U_.emplace(ell, es.eigenvectors());
    }

    for (int om = N % 2; om <= N; om += 2) {
      Eigen::VectorXd dp(2 * om);
      for (int ell = -om; ell < om; ++ell) {
        const Eigen::MatrixXd b = dplus_block(N, ell);
        dp[ell + om] = U_.at(ell + 1).col(column(ell + 1, om)).dot(b * U_.at(ell).col(column(ell, om)));
      }
      raise_.emplace(om, std::move(dp));
    }
  }

  int N() const { return N_; }

  /// Smallest multiplet label present in sector l.
  int min_weight(int ell) const {
    const int a = std::abs(ell);
    return (N_ - a) % 2 == 0 ? a : a + 1;
  }
  int column(int ell, int om) const { return (om - min_weight(ell)) / 2; }

  std::vector<int> weights() const {
    std::vector<int> w;
    for (int om = N_ % 2; om <= N_; om += 2) w.push_back(om);
    return w;
  }

  /// Columns are W eigenvectors in sector l, ordered by ascending w.
  const Eigen::MatrixXd& sector_basis(int ell) const { return U_.at(ell); }

  /// <w, l+1 | D+ | w, l> for l = -w .. w-1 (index l + w).
  const Eigen::VectorXd& raising(int om) const { return raise_.at(om); }

  /// Largest |<w', l+1| D+ |w, l>| with w' != w; zero up to rounding.
  double leakage() const {
    double worst = 0.0;
    for (int ell = -N_; ell < N_; ++ell) {
      const Eigen::MatrixXd m = U_.at(ell + 1).transpose() * dplus_block(N_, ell) * U_.at(ell);
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
          const int wi = min_weight(ell + 1) + 2 * i;
          const int wj = min_weight(ell) + 2 * j;
          if (wi != wj) worst = std::max(worst, std::abs(m(i, j)));
        }
    }
    return worst;
  }

  /// Multiplet coordinates of sector-l amplitudes: entry j belongs to w = min_weight(l) + 2j.
  Eigen::VectorXcd project(int ell, const Eigen::VectorXcd& amps) const {
    return U_.at(ell).transpose() * amps;
  }

 private:
  int N_;
  std::map<int, Eigen::MatrixXd> U_;
  std::map<int, Eigen::VectorXd> raise_;
};

/// Shared, lazily built multiplet bases keyed by N.
inline std::shared_ptr<const IrrepBasis> irrep_basis(int N) {
  static std::mutex mtx;
  static std::map<int, std::shared_ptr<const IrrepBasis>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto& slot = cache[N];
  if (!slot) slot = std::make_shared<const IrrepBasis>(N);
  return slot;
}

}  // namespace vibron
