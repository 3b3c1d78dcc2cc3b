#pragma once

// Per-sector spectra, degeneracy gaps between sectors, Anderson-tower
// band-width series and log-log power-law fits.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vibron/error.hpp"
#include "vibron/model.hpp"

namespace vibron {

struct SectorSpectrum {
  int ell = 0;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

using Spectra = std::map<int, SectorSpectrum>;

inline SectorSpectrum diagonalize_block(int ell, const Eigen::MatrixXd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success)
    throw NumericalError("diagonalize: eigensolver failed in sector l=" + std::to_string(ell));
  SectorSpectrum s{ell, es.eigenvalues(), es.eigenvectors()};
  const Eigen::MatrixXd& v = s.eigenvectors;
  const double recon = (b - v * s.eigenvalues.asDiagonal() * v.transpose()).cwiseAbs().maxCoeff();
  if (!(recon < 1e-9))
    throw NumericalError("diagonalize: reconstruction residual " + std::to_string(recon) +
                         " in sector l=" + std::to_string(ell));
  const int d = s.size();
  const double ortho = (v.transpose() * v - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  if (!(ortho < 1e-10))
    throw NumericalError("diagonalize: eigenvectors not orthonormal in sector l=" + std::to_string(ell));
  return s;
}

inline Spectra diagonalize(const BlockHamiltonian& h) {
  Spectra out;
  for (const auto& [ell, b] : h.blocks) out.emplace(ell, diagonalize_block(ell, b));
  return out;
}

/// Eigenvalues only, for a chosen set of sectors.
inline std::map<int, Eigen::VectorXd> sector_energies(const ModelParams& p, const std::vector<int>& ells) {
  std::map<int, Eigen::VectorXd> out;
  for (int ell : ells) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_sector(p, ell), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericalError("sector_energies: eigensolver failed in sector l=" + std::to_string(ell));
    out.emplace(ell, es.eigenvalues());
  }
  return out;
}

inline double ground_energy(const Spectra& s) {
  double e = std::numeric_limits<double>::infinity();
  for (const auto& [ell, sp] : s) e = std::min(e, sp.eigenvalues[0]);
  return e;
}

namespace detail {

inline const Eigen::VectorXd& energies_of(const std::map<int, Eigen::VectorXd>& m, int ell) {
  auto it = m.find(ell);
  if (it == m.end()) throw std::invalid_argument("gap: sector l=" + std::to_string(ell) + " not available");
  return it->second;
}

inline std::map<int, Eigen::VectorXd> energies(const Spectra& s) {
  std::map<int, Eigen::VectorXd> m;
  for (const auto& [ell, sp] : s) m.emplace(ell, sp.eigenvalues);
  return m;
}

}  // namespace detail

/// |E_n^{l1} - E_n^{l2}| with n counted from the bottom of each sector.
inline double gap(const std::map<int, Eigen::VectorXd>& e, int n, int l1, int l2) {
  const auto& a = detail::energies_of(e, l1);
  const auto& b = detail::energies_of(e, l2);
  if (n < 0 || n >= a.size() || n >= b.size())
    throw std::out_of_range("gap: band " + std::to_string(n) + " missing in sector " +
                            std::to_string(n >= a.size() ? l1 : l2));
  return std::abs(a[n] - b[n]);
}

inline double gap(const Spectra& s, int n, int l1, int l2) { return gap(detail::energies(s), n, l1, l2); }

/// Same, with k counted down from the highest level of each sector (k = 0 is the top).
inline double gap_from_top(const std::map<int, Eigen::VectorXd>& e, int k, int l1, int l2) {
  const auto& a = detail::energies_of(e, l1);
  const auto& b = detail::energies_of(e, l2);
  if (k < 0 || k >= a.size() || k >= b.size())
    throw std::out_of_range("gap_from_top: band " + std::to_string(k) + " missing");
  return std::abs(a[a.size() - 1 - k] - b[b.size() - 1 - k]);
}

inline double gap_from_top(const Spectra& s, int k, int l1, int l2) {
  return gap_from_top(detail::energies(s), k, l1, l2);
}

struct GapSeries {
  std::string descriptor;
  std::vector<std::pair<int, double>> points;  // (N, gap)

  void add(int N, double g) {
    detail::require(g >= 0.0, "GapSeries: negative gap");
    detail::require(points.empty() || N > points.back().first, "GapSeries: N must increase");
    points.emplace_back(N, g);
  }
};

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  int used = 0;
  std::vector<std::string> warnings;
};

/// Least squares of log y against log x. Non-positive y are dropped with a warning.
inline PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& xy) {
  PowerLawFit fit;
  std::vector<double> lx, ly;
  for (const auto& [x, y] : xy) {
    if (!(y > 0.0) || !(x > 0.0)) {
      fit.warnings.push_back("dropped non-positive point at x=" + std::to_string(x));
      continue;
    }
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  fit.used = static_cast<int>(lx.size());
  if (fit.used < 4)
    throw std::invalid_argument("fit_power_law: " + std::to_string(fit.used) +
                                " positive points, at least 4 required");
  const double n = fit.used;
  double mx = 0, my = 0;
  for (int i = 0; i < fit.used; ++i) mx += lx[i] / n, my += ly[i] / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < fit.used; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  detail::require(sxx > 0.0, "fit_power_law: all x values coincide");
  // A series constant up to rounding of the logs is fitted exactly, slope 0.
  double scale = 0;
  for (double v : ly) scale = std::max(scale, std::abs(v));
  const double noise = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
  if (syy <= n * noise * noise) {
    fit.exponent = 0.0;
    fit.prefactor = std::exp(my);
    fit.r2 = 1.0;
    return fit;
  }
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  double sse = 0;
  for (int i = 0; i < fit.used; ++i) {
    const double r = ly[i] - (my + fit.exponent * (lx[i] - mx));
    sse += r * r;
  }
  fit.r2 = 1.0 - sse / syy;
  return fit;
}

inline PowerLawFit fit_power_law(const GapSeries& s) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& [N, g] : s.points) xy.emplace_back(N, g);
  return fit_power_law(xy);
}

/// Nearest integer, halves away from zero.
inline long nearest_integer(double x) { return std::lround(x); }

enum class BandPhase { I, II };

/// l(d) = [l0 (N/N0)^d]; in phase II the nearest even integer, since only
/// same-parity sectors pair up there.
inline int band_ell(int N, double d, int ell0, int N0, BandPhase phase) {
  const double x = ell0 * std::pow(double(N) / N0, d);
  const long ell = phase == BandPhase::I ? nearest_integer(x) : 2 * nearest_integer(x / 2.0);
  return static_cast<int>(ell);
}

struct BandWidthRequest {
  double xi = 0.6;
  double mu = 0.0;
  std::vector<int> Ns;
  double d = 0.5;
  int ell0 = 10;
  int N0 = 103;
  double eps = 0.2;
  BandPhase phase = BandPhase::I;
};

struct BandWidthPoint {
  int N = 0;
  int ell = 0;
  int band = 0;  // phase I: index from the bottom; phase II: from the top
  double gap = 0.0;
};

/// Gap between sector 0 and sector l(d) in the band whose excitation energy per
/// particle (from the ground state in phase I, from the top of the spectrum in
/// phase II) lies closest to eps.
inline BandWidthPoint band_width_point(const BandWidthRequest& r, int N) {
  const int ell = band_ell(N, r.d, r.ell0, r.N0, r.phase);
  if (ell > N) throw std::invalid_argument("band_gap_width: l(d) = " + std::to_string(ell) + " exceeds N");
  const ModelParams p{N, r.xi, r.mu};
  const auto e = sector_energies(p, {0, ell});
  const Eigen::VectorXd& e0 = e.at(0);

  BandWidthPoint pt{N, ell, 0, 0.0};
  double best = std::numeric_limits<double>::infinity();
  const int usable = std::min<int>(e0.size(), e.at(ell).size());
  if (r.phase == BandPhase::I) {
    const double ref = e0[0];
    for (int n = 0; n < usable; ++n) {
      const double dist = std::abs((e0[n] - ref) / N - r.eps);
      if (dist < best) best = dist, pt.band = n;
    }
    pt.gap = gap(e, pt.band, 0, ell);
  } else {
    const double ref = e0[e0.size() - 1];
    for (int k = 0; k < usable; ++k) {
      const double dist = std::abs((ref - e0[e0.size() - 1 - k]) / N - r.eps);
      if (dist < best) best = dist, pt.band = k;
    }
    pt.gap = gap_from_top(e, pt.band, 0, ell);
  }
  return pt;
}

inline GapSeries band_gap_width(const BandWidthRequest& r) {
  GapSeries s;
  s.descriptor = std::string("band_") + (r.phase == BandPhase::I ? "I" : "II") + "_d=" + std::to_string(r.d);
  for (int N : r.Ns) s.add(N, band_width_point(r, N).gap);
  return s;
}

struct LevelFlowRow {
  double xi;
  int ell;
  int n;
  double excitation_per_N;
};

/// Excitation energies (E - E_GS)/N of the requested sectors along a xi grid.
inline std::vector<LevelFlowRow> level_flow(int N, double mu, const std::vector<double>& xis,
                                            const std::vector<int>& ells) {
  std::vector<LevelFlowRow> rows;
  for (double xi : xis) {
    const ModelParams p{N, xi, mu};
    std::vector<int> all;
    for (int ell = -N; ell <= N; ++ell) all.push_back(ell);
    const auto e = sector_energies(p, all);
    double gs = std::numeric_limits<double>::infinity();
    for (const auto& [ell, v] : e) gs = std::min(gs, v[0]);
    for (int ell : ells) {
      const Eigen::VectorXd& v = e.at(ell);
      for (int n = 0; n < v.size(); ++n) rows.push_back({xi, ell, n, (v[n] - gs) / N});
    }
  }
  return rows;
}

}  // namespace vibron
