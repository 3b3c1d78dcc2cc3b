#pragma once

// Independent reference constructions for small N. Nothing here reuses the
// sector machinery: operators come straight from Fock occupation numbers in
// an unsorted (n_sigma, n+, n-) basis.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <tuple>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Mode order: 0 = sigma, 1 = tau+, 2 = tau-.
using Occ = std::array<int, 3>;

struct FockSpace {
  int N;
  std::vector<Occ> states;  // enumerated by descending n_sigma, then descending n+
  std::map<Occ, int> index;

  explicit FockSpace(int n) : N(n) {
    for (int ns = N; ns >= 0; --ns)
      for (int np = N - ns; np >= 0; --np) {
        Occ o{ns, np, N - ns - np};
        index[o] = static_cast<int>(states.size());
        states.push_back(o);
      }
  }
  int dim() const { return static_cast<int>(states.size()); }

  /// a_i^dag a_j on the fixed-N space.
  Eigen::MatrixXd hop(int i, int j) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
    for (int c = 0; c < dim(); ++c) {
      Occ o = states[c];
      if (o[j] == 0) continue;
      double amp = std::sqrt(double(o[j]));
      o[j] -= 1;
      amp *= std::sqrt(double(o[i] + 1));
      o[i] += 1;
      m(index.at(o), c) += amp;
    }
    return m;
  }

  Eigen::MatrixXd dplus() const { return std::sqrt(2.0) * (hop(1, 0) - hop(0, 2)); }
  Eigen::MatrixXd L() const { return hop(1, 1) - hop(2, 2); }
  Eigen::MatrixXd n_tau() const { return hop(1, 1) + hop(2, 2); }

  Eigen::MatrixXd hamiltonian(double xi, double mu) const {
    const Eigen::MatrixXd dp = dplus(), dm = dp.transpose(), l = L();
    Eigen::MatrixXd h = (1.0 - xi) * n_tau() + mu * l;
    if (xi != 0.0) {
      Eigen::MatrixXd p = double(N) * N * Eigen::MatrixXd::Identity(dim(), dim()) - l * l -
                          0.5 * (dp * dm + dm * dp);
      h += xi / (N - 1.0) * p;
    }
    return h;
  }
};

/// Sparse polynomial in creation operators acting on |0>, kept as Fock amplitudes.
struct FockVector {
  std::map<Occ, cplx> amp;

  static FockVector vacuum() { return FockVector{{{Occ{0, 0, 0}, 1.0}}}; }

  FockVector create(int mode, cplx coef = 1.0) const {
    FockVector out;
    for (const auto& [o, a] : amp) {
      Occ p = o;
      p[mode] += 1;
      out.amp[p] += coef * std::sqrt(double(p[mode])) * a;
    }
    return out;
  }
  FockVector& operator+=(const FockVector& other) {
    for (const auto& [o, a] : other.amp) amp[o] += a;
    return *this;
  }
  FockVector operator*(cplx s) const {
    FockVector out = *this;
    for (auto& [o, a] : out.amp) a *= s;
    return out;
  }
};

/// Coherent state built term by term from its defining sum over m.
inline FockVector coherent_by_expansion(int N, cplx ap, cplx am) {
  FockVector total;
  for (int m = 0; m <= N; ++m) {
    FockVector v = FockVector::vacuum();
    for (int k = 0; k < m; ++k) {
      FockVector a = v.create(1, ap);
      a += v.create(2, am);
      v = a;
    }
    for (int k = 0; k < N - m; ++k) v = v.create(0);
    const double pref = std::sqrt(std::pow(double(N), m) / std::tgamma(N - m + 1.0)) / std::tgamma(m + 1.0);
    total += v * pref;
  }
  double nrm = 0.0;
  for (const auto& [o, a] : total.amp) nrm += std::norm(a);
  return total * (1.0 / std::sqrt(nrm));
}

}  // namespace oracle
