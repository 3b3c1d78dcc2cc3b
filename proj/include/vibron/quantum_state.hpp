#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <set>

#include "vibron/basis.hpp"

namespace vibron {

using cplx = std::complex<double>;

/// Pure state stored sector by sector; sectors missing from the map are zero.
class QuantumState {
 public:
  QuantumState() = default;
  explicit QuantumState(int N) : N_(N) {}

  int N() const { return N_; }
  const std::map<int, Eigen::VectorXcd>& sectors() const { return amps_; }

  bool has(int ell) const { return amps_.count(ell) != 0; }

  /// Amplitudes of sector l (zero vector of the right size when absent).
  Eigen::VectorXcd sector(int ell) const {
    auto it = amps_.find(ell);
    if (it != amps_.end()) return it->second;
    return Eigen::VectorXcd::Zero(sector_dimension(N_, ell));
  }

  void set_sector(int ell, Eigen::VectorXcd v) {
    detail::require(v.size() == sector_dimension(N_, ell),
                    "QuantumState: wrong amplitude length for sector " + std::to_string(ell));
    amps_[ell] = std::move(v);
  }

  Eigen::VectorXcd& mutable_sector(int ell) {
    auto it = amps_.find(ell);
    if (it == amps_.end())
      it = amps_.emplace(ell, Eigen::VectorXcd::Zero(sector_dimension(N_, ell))).first;
    return it->second;
  }

  std::set<int> support(double tol = 0.0) const {
    std::set<int> s;
    for (const auto& [ell, v] : amps_)
      if (v.squaredNorm() > tol) s.insert(ell);
    return s;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [ell, v] : amps_) s += v.squaredNorm();
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  QuantumState& scale(cplx factor) {
    for (auto& [ell, v] : amps_) v *= factor;
    return *this;
  }

  QuantumState normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw std::invalid_argument("QuantumState: cannot normalize a zero state");
    QuantumState out = *this;
    out.scale(1.0 / n);
    return out;
  }

  void require_normalized(double tol = 1e-10) const {
    const double dev = std::abs(norm() - 1.0);
    if (!(dev <= tol))
      throw std::invalid_argument("QuantumState: state is not normalized (|norm-1| = " +
                                  std::to_string(dev) + ")");
  }

 private:
  int N_ = 0;
  std::map<int, Eigen::VectorXcd> amps_;
};

/// <a|b>
inline cplx inner(const QuantumState& a, const QuantumState& b) {
  detail::require(a.N() == b.N(), "inner: boson numbers differ");
  cplx s = 0.0;
  for (const auto& [ell, va] : a.sectors()) {
    auto it = b.sectors().find(ell);
    if (it != b.sectors().end()) s += va.dot(it->second);
  }
  return s;
}

inline double expectation_L(const QuantumState& psi) {
  double s = 0.0;
  for (const auto& [ell, v] : psi.sectors()) s += ell * v.squaredNorm();
  return s / psi.squared_norm();
}

/// Full-basis occupation expectation <n+ + n->.
inline double expectation_n_tau(const QuantumState& psi) {
  double s = 0.0;
  for (const auto& [ell, v] : psi.sectors()) {
    const SectorBasis b = make_sector(psi.N(), ell);
    for (int i = 0; i < b.size(); ++i) s += b.labels[i].n_tau() * std::norm(v[i]);
  }
  return s / psi.squared_norm();
}

}  // namespace vibron
