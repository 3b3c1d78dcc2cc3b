#pragma once

// Composite runs shared by the command-line tool and the acceptance checks.

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "vibron/angle_model.hpp"
#include "vibron/classical.hpp"
#include "vibron/evolve.hpp"
#include "vibron/sign_operator.hpp"
#include "vibron/spectral.hpp"
#include "vibron/states.hpp"

namespace vibron {

// ---------------------------------------------------------------------------
// Sign expectations of a prepared state.

struct SignTable {
  std::string state;
  int N = 0;
  std::array<double, 4> C{};
  std::array<double, 4> K{};
  cplx dplus_per_N = 0.0;
};

inline SignTable sign_table(const std::string& label, const QuantumState& psi, double zero_tol = kDefaultZeroTol) {
  SignTable t{label, psi.N(), {}, {}, 0.0};
  for (int n = 1; n <= 4; ++n) {
    t.C[n - 1] = cached_sign_operator(ObservableKind::X, n, psi.N(), zero_tol)->expectation(psi);
    t.K[n - 1] = cached_sign_operator(ObservableKind::Y, n, psi.N(), zero_tol)->expectation(psi);
  }
  t.dplus_per_N = graded_expectation(dplus_operator(psi.N()), psi) / double(psi.N());
  return t;
}

/// Coherent state on the ground manifold and its three-fold rotated superposition.
inline std::array<SignTable, 2> table1(int N, double xi, double q1, double zero_tol = kDefaultZeroTol) {
  const QuantumState c = coherent_state(N, manifold_point(xi, q1));
  return {sign_table("classical", c, zero_tol), sign_table("quantum", three_fold_superposition(c), zero_tol)};
}

// ---------------------------------------------------------------------------
// Quench observables and prethermalization times.

/// "C1".."C4", "K1".."K4" (sign operators) or "alpha1", "alpha2", ... (angles).
struct QuenchObservable {
  std::string name;
  bool is_angle = false;
  ObservableKind kind = ObservableKind::X;
  int n = 1;

  static QuenchObservable parse(const std::string& s) {
    QuenchObservable o{s};
    try {
      if (s.rfind("alpha", 0) == 0) {
        o.is_angle = true;
        o.n = std::stoi(s.substr(5));
      } else if (!s.empty() && (s[0] == 'C' || s[0] == 'K')) {
        o.kind = s[0] == 'C' ? ObservableKind::X : ObservableKind::Y;
        o.n = std::stoi(s.substr(1));
      } else {
        throw std::invalid_argument("");
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument("unknown quench observable '" + s + "' (expected C<n>, K<n> or alpha<n>)");
    }
    detail::require(o.n >= 1, "quench observable power must be >= 1: " + s);
    return o;
  }
};

/// Real-valued trace of an observable along a quench (angles wrapped to [0, 2pi)).
inline std::function<double(double)> quench_trace(const QuenchEvolver& ev, const QuenchObservable& o,
                                                  double zero_tol = kDefaultZeroTol) {
  if (o.is_angle) {
    auto g = std::make_shared<const GradedOperator>(power_operator(dplus_operator(ev.N()), o.n));
    return [&ev, g](double t) { return wrap_angle(std::arg(ev.graded(*g, t))); };
  }
  auto s = cached_sign_operator(o.kind, o.n, ev.N(), zero_tol);
  auto tracker = ev.sign_tracker(*s);
  return [s, tracker](double t) { return tracker(t).expectation(); };
}

struct TauStarRow {
  int N = 0;
  std::string observable;
  PrethermalizationEstimate estimate;
};

struct QuenchSweep {
  std::vector<TauStarRow> rows;
  std::map<std::string, PowerLawFit> fits;
  std::map<std::string, std::string> fit_errors;
};

inline QuenchSweep quench_tau_star(const QuenchSpec& spec, const std::vector<int>& Ns,
                                   const std::vector<std::string>& observables, double gamma = kDefaultGamma,
                                   int refine_levels = 2) {
  QuenchSweep out;
  std::map<std::string, std::vector<std::pair<double, double>>> pts;
  for (int N : Ns) {
    ModelParams fin = spec.final_;
    fin.N = N;
    const QuenchEvolver ev(fin, prepare_state(spec.state, N));
    for (const auto& name : observables) {
      const QuenchObservable o = QuenchObservable::parse(name);
      const auto f = quench_trace(ev, o, spec.zero_tol);
      const auto e = tau_star_search(f, spec.grid, gamma, refine_levels,
                                     o.is_angle ? Distance::Circular : Distance::Linear);
      out.rows.push_back({N, name, e});
      if (e.resolved) pts[name].emplace_back(N, e.tau_star);
    }
  }
  for (const auto& name : observables) {
    try {
      out.fits[name] = fit_power_law(pts[name]);
    } catch (const std::invalid_argument& err) {
      out.fit_errors[name] = err.what();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Degeneracy gaps.

struct GapSweep {
  std::vector<GapSeries> series;
  std::vector<PowerLawFit> fits;
};

/// Bottom band (0,1) and top band (0,2), (1,3) gaps over an N sweep.
inline GapSweep degeneracy_gaps(double xi, double mu, const std::vector<int>& Ns) {
  GapSweep g;
  GapSeries bottom{"E0(0,1)", {}}, top02{"Etop(0,2)", {}}, top13{"Etop(1,3)", {}};
  for (int N : Ns) {
    const auto e = sector_energies({N, xi, mu}, {0, 1, 2, 3});
    bottom.add(N, gap(e, 0, 0, 1));
    top02.add(N, gap_from_top(e, 0, 0, 2));
    top13.add(N, gap_from_top(e, 0, 1, 3));
  }
  g.series = {bottom, top02, top13};
  for (const auto& s : g.series) g.fits.push_back(fit_power_law(s));
  return g;
}

// ---------------------------------------------------------------------------
// Angle model against measured sign expectations.

/// Angle of the classical order parameter at a ground-manifold point, in [0, 2pi).
inline double manifold_angle(double xi, double q1) { return wrap_angle(std::arg(classical_dplus(manifold_point(xi, q1)))); }

struct AngleModelRow {
  std::string state;
  int N = 0;
  int n = 0;
  ObservableKind kind = ObservableKind::X;
  double prediction = 0.0;
  double measured = std::nan("");
};

struct AngleModelRun {
  double mean = 0.0;
  Calibration calibration;
  std::vector<AngleModelRow> rows;
};

struct AngleModelRequest {
  double xi = 0.6;
  double q1 = -0.63;
  int calibration_N = 150;
  SignTarget target{2, ObservableKind::X, -0.293};
  std::vector<int> Ns{60, 70, 80, 90, 100, 110, 120, 130, 140, 150};
  bool measure = true;
  double a_override = -1.0;  // >= 0 skips calibration
};

inline AngleModelRun angle_model_run(const AngleModelRequest& r) {
  AngleModelRun run;
  run.mean = manifold_angle(r.xi, r.q1);
  if (r.a_override >= 0.0) {
    run.calibration = {r.a_override, 0.0, r.a_override == 0.0};
  } else {
    run.calibration = calibrate_a(r.target, GaussianMixture::single(run.mean, 0.0, r.calibration_N));
  }
  const double a = run.calibration.a;
  const std::vector<std::pair<int, ObservableKind>> cls{{2, ObservableKind::X}, {4, ObservableKind::Y}};
  const std::vector<std::pair<int, ObservableKind>> qnt{
      {2, ObservableKind::X}, {4, ObservableKind::X}, {4, ObservableKind::Y}};
  for (int N : r.Ns) {
    std::array<SignTable, 2> measured{};
    if (r.measure) measured = table1(N, r.xi, r.q1);
    auto emit = [&](const std::string& state, const GaussianMixture& mix, const SignTable& m,
                    const std::vector<std::pair<int, ObservableKind>>& list) {
      for (const auto& [n, kind] : list) {
        AngleModelRow row{state, N, n, kind, predict_sign_expectation(mix, n, kind)};
        if (r.measure) row.measured = kind == ObservableKind::X ? m.C[n - 1] : m.K[n - 1];
        run.rows.push_back(row);
      }
    };
    emit("classical", GaussianMixture::single(run.mean, a, N), measured[0], cls);
    emit("quantum", GaussianMixture::three_fold(run.mean, a, N), measured[1], qnt);
  }
  return run;
}

}  // namespace vibron
