#pragma once

// Fock basis of the two-level, three-boson (sigma, tau+, tau-) system with
// fixed total boson number N, graded by angular momentum l = n+ - n-.

#include <cstdlib>
#include <string>
#include <unordered_map>
#include <vector>

#include "vibron/error.hpp"

namespace vibron {

struct ModelParams {
  int N = 1;
  double xi = 0.0;
  double mu = 0.0;

  void validate() const {
    detail::require(N >= 1, "ModelParams: N must be >= 1, got " + std::to_string(N));
    detail::require(xi >= 0.0 && xi <= 1.0,
                    "ModelParams: xi must lie in [0,1], got " + std::to_string(xi));
    detail::require(N > 1 || xi == 0.0, "ModelParams: N = 1 requires xi = 0 (division by N-1)");
  }
};

struct FockLabel {
  int n_plus = 0;
  int n_minus = 0;

  int ell() const { return n_plus - n_minus; }
  int n_tau() const { return n_plus + n_minus; }
  int n_sigma(int N) const { return N - n_plus - n_minus; }

  friend bool operator==(const FockLabel&, const FockLabel&) = default;
};

/// Dimension of sector l for N bosons; 0 outside [-N, N].
inline int sector_dimension(int N, int ell) {
  const int a = std::abs(ell);
  if (a > N) return 0;
  return (N - a) % 2 == 0 ? (N - a) / 2 + 1 : (N - a + 1) / 2;
}

inline long total_dimension(int N) { return static_cast<long>(N + 1) * (N + 2) / 2; }

struct SectorBasis {
  int ell = 0;
  std::vector<FockLabel> labels;  // ascending n_plus

  int size() const { return static_cast<int>(labels.size()); }

  /// Position of |n+, n-> inside this sector, or -1.
  int index_of(int n_plus, int n_minus) const {
    if (n_plus - n_minus != ell || labels.empty()) return -1;
    const int pos = n_plus - labels.front().n_plus;
    if (pos < 0 || pos >= size()) return -1;
    return pos;
  }
};

inline SectorBasis make_sector(int N, int ell) {
  SectorBasis s;
  s.ell = ell;
  // n+ - n- = l and n+ + n- <= N; n- = n+ - l >= 0.
  for (int np = std::max(0, ell); 2 * np - ell <= N; ++np) s.labels.push_back({np, np - ell});
  return s;
}

/// All nonempty sectors l = -N..N in ascending order.
inline std::vector<SectorBasis> enumerate_sectors(int N) {
  detail::require(N >= 1, "enumerate_sectors: N must be >= 1, got " + std::to_string(N));
  std::vector<SectorBasis> out;
  out.reserve(2 * N + 1);
  for (int ell = -N; ell <= N; ++ell) out.push_back(make_sector(N, ell));
  return out;
}

}  // namespace vibron
