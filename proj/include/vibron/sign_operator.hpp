#pragma once

// Spectral sign functions C_n = sign(X_n), K_n = sign(Y_n).
//
// Inside a multiplet w, (D+)^n links l to l+n only, so each residue chain
// l0, l0+n, l0+2n, ... carries a tridiagonal block with zero diagonal and
// off-diagonals b_k = <w,l_k+n|(D+)^n|w,l_k>/2. The Y_n block equals
// G X' G^dag with G = diag((-i)^k), so both kinds share one real tridiagonal
// eigenproblem per chain.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "vibron/irreps.hpp"
#include "vibron/observables.hpp"

namespace vibron {

inline constexpr double kDefaultZeroTol = 1e-10;

struct SignProbabilities {
  double plus = 0.0;
  double zero = 0.0;
  double minus = 0.0;

  double expectation() const { return plus - minus; }
};

class SignOperator {
 public:
  struct Chain {
    int omega = 0;
    std::vector<int> ells;          // l values along the chain
    Eigen::VectorXd eigenvalues;    // ascending
    Eigen::MatrixXcd eigenvectors;  // columns, in chain coordinates
    std::vector<int> signs;         // -1, 0, +1
    double zero_tol = 0.0;          // absolute threshold used for this chain
  };

  SignOperator(ObservableKind kind, int n, std::shared_ptr<const IrrepBasis> basis,
               double zero_tol = kDefaultZeroTol)
      : kind_(kind), n_(n), zero_tol_(zero_tol), basis_(std::move(basis)) {
    detail::require(n >= 1, "SignOperator: n must be >= 1");
    detail::require(zero_tol >= 0.0, "SignOperator: zero_tol must be non-negative");
    for (int om : basis_->weights()) build_multiplet(om);
  }

  ObservableKind kind() const { return kind_; }
  int n() const { return n_; }
  int N() const { return basis_->N(); }
  double zero_tol() const { return zero_tol_; }
  const std::vector<Chain>& chains() const { return chains_; }
  const IrrepBasis& basis() const { return *basis_; }

  std::string label() const { return std::string(1, sign_label(kind_)) + std::to_string(n_); }

  /// Multiplet coordinates of a state: w -> vector indexed by l + w.
  std::map<int, Eigen::VectorXcd> coordinates(const QuantumState& psi) const {
    std::map<int, Eigen::VectorXcd> out;
    for (int om : basis_->weights()) out.emplace(om, Eigen::VectorXcd::Zero(2 * om + 1));
    for (const auto& [ell, v] : psi.sectors()) {
      const Eigen::VectorXcd c = basis_->project(ell, v);
      const int w0 = basis_->min_weight(ell);
      for (int j = 0; j < c.size(); ++j) out.at(w0 + 2 * j)[ell + w0 + 2 * j] = c[j];
    }
    return out;
  }

  SignProbabilities probabilities(const QuantumState& psi) const {
    detail::require(psi.N() == N(), "SignOperator: boson numbers differ");
    psi.require_normalized(1e-10);
    const auto coords = coordinates(psi);
    SignProbabilities p;
    for (const Chain& ch : chains_) {
      const Eigen::VectorXcd& a = coords.at(ch.omega);
      Eigen::VectorXcd sub(ch.ells.size());
      for (std::size_t k = 0; k < ch.ells.size(); ++k) sub[k] = a[ch.ells[k] + ch.omega];
      if (sub.squaredNorm() == 0.0) continue;
      const Eigen::VectorXd w = (ch.eigenvectors.adjoint() * sub).cwiseAbs2();
      for (int k = 0; k < w.size(); ++k) {
        if (ch.signs[k] > 0) p.plus += w[k];
        else if (ch.signs[k] < 0) p.minus += w[k];
        else p.zero += w[k];
      }
    }
    const double total = psi.squared_norm();
    p.plus /= total;
    p.zero /= total;
    p.minus /= total;
    return p;
  }

  double expectation(const QuantumState& psi) const { return probabilities(psi).expectation(); }

  /// All (eigenvalue, sign) pairs.
  std::vector<std::pair<double, int>> spectrum() const {
    std::vector<std::pair<double, int>> out;
    for (const Chain& ch : chains_)
      for (int k = 0; k < ch.eigenvalues.size(); ++k) out.emplace_back(ch.eigenvalues[k], ch.signs[k]);
    return out;
  }

  /// Dense operator on the full space (small N only).
  Eigen::MatrixXcd dense() const {
    const FullSpaceIndex idx(N());
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(idx.dim, idx.dim);
    for (const Chain& ch : chains_) {
      Eigen::MatrixXcd embed = Eigen::MatrixXcd::Zero(idx.dim, ch.ells.size());
      for (std::size_t k = 0; k < ch.ells.size(); ++k) {
        const int ell = ch.ells[k];
        const Eigen::VectorXd u = basis_->sector_basis(ell).col(basis_->column(ell, ch.omega));
        embed.block(idx.offset.at(ell), k, u.size(), 1) = u.cast<cplx>();
      }
      const Eigen::MatrixXcd vecs = embed * ch.eigenvectors;
      Eigen::VectorXd sg(ch.signs.size());
      for (std::size_t k = 0; k < ch.signs.size(); ++k) sg[k] = ch.signs[k];
      s += vecs * sg.asDiagonal() * vecs.adjoint();
    }
    return s;
  }

  /// Projectors onto the positive and negative eigenspaces, restricted to a
  /// set of sectors and written in multiplet coordinates. States supported on
  /// those sectors only touch the matching eigenvector rows.
  class Restricted {
   public:
    struct Piece {
      int omega;
      std::vector<int> ells;  // support sectors with |l| <= w
      std::vector<int> cols;  // multiplet column of w inside each sector
      Eigen::MatrixXcd plus;
      Eigen::MatrixXcd minus;
    };

    /// `sector_coords` holds basis().project(l, psi_l) for the support sectors;
    /// the state must be normalized.
    SignProbabilities probabilities(const std::map<int, Eigen::VectorXcd>& sector_coords) const {
      SignProbabilities p;
      double total = 0.0;
      for (const auto& [ell, c] : sector_coords) total += c.squaredNorm();
      for (const Piece& piece : pieces_) {
        Eigen::VectorXcd a(piece.ells.size());
        for (std::size_t k = 0; k < piece.ells.size(); ++k) {
          auto it = sector_coords.find(piece.ells[k]);
          a[k] = it == sector_coords.end() ? cplx(0.0) : it->second[piece.cols[k]];
        }
        p.plus += a.dot(piece.plus * a).real();
        p.minus += a.dot(piece.minus * a).real();
      }
      p.zero = total - p.plus - p.minus;
      return p;
    }

    double expectation(const std::map<int, Eigen::VectorXcd>& sector_coords) const {
      return probabilities(sector_coords).expectation();
    }

    const std::vector<Piece>& pieces() const { return pieces_; }

   private:
    friend class SignOperator;
    std::vector<Piece> pieces_;
  };

  Restricted restrict_to(const std::set<int>& support) const {
    std::map<int, Restricted::Piece> by_omega;
    for (const Chain& ch : chains_) {
      std::vector<int> rows;
      for (std::size_t k = 0; k < ch.ells.size(); ++k)
        if (support.count(ch.ells[k])) rows.push_back(static_cast<int>(k));
      if (rows.empty()) continue;
      Eigen::MatrixXcd v(rows.size(), ch.eigenvectors.cols());
      for (std::size_t i = 0; i < rows.size(); ++i) v.row(i) = ch.eigenvectors.row(rows[i]);
      Eigen::VectorXd pos(ch.signs.size()), neg(ch.signs.size());
      for (std::size_t k = 0; k < ch.signs.size(); ++k) {
        pos[k] = ch.signs[k] > 0 ? 1.0 : 0.0;
        neg[k] = ch.signs[k] < 0 ? 1.0 : 0.0;
      }
      // Chains of one multiplet are disjoint in l, so they stack block-diagonally.
      auto& piece = by_omega[ch.omega];
      piece.omega = ch.omega;
      const int old = static_cast<int>(piece.ells.size());
      const int add = static_cast<int>(rows.size());
      for (int row : rows) {
        piece.ells.push_back(ch.ells[row]);
        piece.cols.push_back(basis_->column(ch.ells[row], ch.omega));
      }
      auto grow = [&](Eigen::MatrixXcd& m, const Eigen::MatrixXcd& block) {
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(old + add, old + add);
        if (old > 0) g.topLeftCorner(old, old) = m;
        g.bottomRightCorner(add, add) = block;
        m = std::move(g);
      };
      grow(piece.plus, v * pos.asDiagonal() * v.adjoint());
      grow(piece.minus, v * neg.asDiagonal() * v.adjoint());
    }
    Restricted r;
    for (auto& [om, piece] : by_omega) r.pieces_.push_back(std::move(piece));
    return r;
  }

 private:
  void build_multiplet(int om) {
    const Eigen::VectorXd& raise = basis_->raising(om);
    const int dim = 2 * om + 1;
    for (int start = -om; start < -om + std::min(n_, dim); ++start) {
      Chain ch;
      ch.omega = om;
      for (int ell = start; ell <= om; ell += n_) ch.ells.push_back(ell);
      const int len = static_cast<int>(ch.ells.size());

      Eigen::VectorXd diag = Eigen::VectorXd::Zero(len);
      Eigen::VectorXd off(std::max(len - 1, 0));
      for (int k = 0; k + 1 < len; ++k) {
        double prod = 1.0;
        for (int ell = ch.ells[k]; ell < ch.ells[k] + n_; ++ell) prod *= raise[ell + om];
        off[k] = 0.5 * prod;
      }

      Eigen::MatrixXd vecs;
      if (len == 1) {
        ch.eigenvalues = Eigen::VectorXd::Zero(1);
        vecs = Eigen::MatrixXd::Identity(1, 1);
      } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
        if (es.info() != Eigen::Success)
          throw NumericalError("sign operator " + std::string(1, sign_label(kind_)) +
                               std::to_string(n_) + ": eigensolver failed on block w=" +
                               std::to_string(om) + ", l0=" + std::to_string(start));
        ch.eigenvalues = es.eigenvalues();
        vecs = es.eigenvectors();
      }

      ch.eigenvectors = vecs.cast<cplx>();
      if (kind_ == ObservableKind::Y) {
        cplx phase = 1.0;
        for (int k = 0; k < len; ++k) {
          ch.eigenvectors.row(k) *= phase;
          phase *= cplx(0.0, -1.0);
        }
      }

      const double scale = ch.eigenvalues.size() ? ch.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
      ch.zero_tol = zero_tol_ * scale;
      for (int k = 0; k < len; ++k) {
        const double lam = ch.eigenvalues[k];
        ch.signs.push_back(std::abs(lam) <= ch.zero_tol ? 0 : (lam > 0 ? 1 : -1));
      }
      chains_.push_back(std::move(ch));
    }
  }

  ObservableKind kind_;
  int n_;
  double zero_tol_;
  std::shared_ptr<const IrrepBasis> basis_;
  std::vector<Chain> chains_;
};

inline SignOperator sign_operator(const HermitianObservable& obs, double zero_tol = kDefaultZeroTol) {
  return SignOperator(obs.kind, obs.n, irrep_basis(obs.N()), zero_tol);
}

inline double expectation_sign(const QuantumState& psi, const SignOperator& s) {
  return s.expectation(psi);
}

/// Sign operators depend on (kind, n, N, zero_tol) only, not on xi or mu; they
/// are shared across quench samples and sweeps.
inline std::shared_ptr<const SignOperator> cached_sign_operator(ObservableKind kind, int n, int N,
                                                                double zero_tol = kDefaultZeroTol) {
  static std::mutex mtx;
  static std::map<std::tuple<int, int, int, double>, std::shared_ptr<const SignOperator>> cache;
  const auto key = std::make_tuple(static_cast<int>(kind), n, N, zero_tol);
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto op = std::make_shared<const SignOperator>(kind, n, irrep_basis(N), zero_tol);
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(key, std::move(op)).first->second;
}

}  // namespace vibron
