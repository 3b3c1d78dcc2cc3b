// Experiment runner: one subcommand per study, CSV outputs plus a manifest.json
// run record. Settings come from flags and an optional sectioned key = value
// file; flags win over file entries.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vibron/io/config.hpp"
#include "vibron/io/csv.hpp"
#include "vibron/vibron.hpp"

namespace fs = std::filesystem;
using namespace vibron;

namespace {

constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Value parsing for list and range flags.

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(io::detail::trim(cur));
  return out;
}

/// "50,90,130" or "50:170:20" (inclusive) or a comma list mixing both.
std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) {
    const auto r = split(part, ':');
    if (r.size() == 1) {
      out.push_back(to_int(r[0]));
    } else if (r.size() == 3) {
      const int a = to_int(r[0]), b = to_int(r[1]), st = to_int(r[2]);
      if (st <= 0) throw std::invalid_argument("range step must be positive in '" + part + "'");
      for (int v = a; v <= b; v += st) out.push_back(v);
    } else {
      throw std::invalid_argument("bad integer list entry '" + part + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

/// "0:1:0.01" (inclusive grid) or "0.1,0.2".
std::vector<double> double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) {
    const auto r = split(part, ':');
    if (r.size() == 1) {
      out.push_back(to_double(r[0]));
    } else if (r.size() == 3) {
      const double a = to_double(r[0]), b = to_double(r[1]), st = to_double(r[2]);
      if (!(st > 0)) throw std::invalid_argument("grid step must be positive in '" + part + "'");
      const long n = static_cast<long>(std::floor((b - a) / st + 1e-9));
      for (long k = 0; k <= n; ++k) out.push_back(a + k * st);
    } else {
      throw std::invalid_argument("bad grid entry '" + part + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

/// "initial:final".
std::pair<double, double> double_pair(const std::string& s) {
  const auto r = split(s, ':');
  if (r.size() != 2) throw std::invalid_argument("expected 'initial:final', got '" + s + "'");
  return {to_double(r[0]), to_double(r[1])};
}

std::set<int> int_set(const std::string& s) {
  const auto v = int_list(s);
  return {v.begin(), v.end()};
}

ObservableKind kind_of(char c) { return c == 'C' ? ObservableKind::X : ObservableKind::Y; }

// ---------------------------------------------------------------------------
// Output bookkeeping.

struct Run {
  std::string command;
  fs::path out_dir;
  std::vector<std::string> outputs;
  nlohmann::json extra = nlohmann::json::object();

  void save(const std::string& name, const io::CsvWriter& w) {
    w.commit(out_dir / name);
    outputs.push_back(name);
  }
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_manifest(const Run& run, const CLI::App& sub, const std::vector<std::string>& argv,
                    const std::string& config_path, double seconds) {
  nlohmann::json j;
  j["tool"] = "vibron";
  j["version"] = kVersion;
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
#if defined(__VERSION__)
  j["compiler"] = __VERSION__;
#endif
  j["command"] = run.command;
  j["argv"] = argv;
  j["config_file"] = config_path;
  nlohmann::json opts = nlohmann::json::object();
  for (const CLI::Option* o : sub.get_options()) {
    if (o->get_name() == "--help") continue;
    const auto res = o->results();
    opts[o->get_name()] = res.empty() ? o->get_default_str() : res.back();
  }
  j["options"] = opts;
  j["started_utc"] = utc_now();
  j["wall_time_s"] = seconds;
  j["outputs"] = run.outputs;
  j["results"] = run.extra;
  const fs::path tmp = run.out_dir / "manifest.json.tmp";
  {
    std::ofstream f(tmp);
    f << j.dump(2) << "\n";
  }
  fs::rename(tmp, run.out_dir / "manifest.json");
}

// ---------------------------------------------------------------------------
// Subcommands.

struct SpectrumArgs {
  int N = 25;
  double mu = 0.0;
  std::string xi_grid = "0:1:0.01";
  std::string ells = "0,1,2,3";
};

void run_spectrum(const SpectrumArgs& a, Run& run) {
  const auto rows = level_flow(a.N, a.mu, double_list(a.xi_grid), int_list(a.ells));
  io::CsvWriter w({"xi", "ell", "n", "excitation_energy_per_N"});
  for (const auto& r : rows) w.row(r.xi, r.ell, r.n, r.excitation_per_N);
  run.save("levelflow.csv", w);
}

void write_gaps(const std::vector<GapSeries>& series, Run& run) {
  io::CsvWriter g({"N", "descriptor", "gap"});
  io::CsvWriter f({"descriptor", "exponent", "r2"});
  for (const auto& s : series) {
    for (const auto& [N, v] : s.points) g.row(N, s.descriptor, v);
    try {
      const PowerLawFit fit = fit_power_law(s);
      for (const auto& w : fit.warnings) std::cerr << "warning: " << s.descriptor << ": " << w << "\n";
      f.row(s.descriptor, fit.exponent, fit.r2);
    } catch (const std::invalid_argument& e) {
      std::cerr << "warning: " << s.descriptor << ": " << e.what() << "\n";
      f.row(s.descriptor, std::nan(""), std::nan(""));
    }
  }
  run.save("gaps.csv", g);
  run.save("fits.csv", f);
}

struct GapsArgs {
  std::string Ns = "40:140:20";
  double xi = 0.6;
  double mu = 0.0;
};

void run_gaps(const GapsArgs& a, Run& run) { write_gaps(degeneracy_gaps(a.xi, a.mu, int_list(a.Ns)).series, run); }

struct BandwidthArgs {
  std::string Ns = "63,83,103,133,163,203,253,303";
  std::string ds = "0.125,0.25,0.5,0.75,0.875";
  int ell0 = 10;
  int N0 = 103;
  double eps = 0.2;
  double xi = 0.6;
  double mu = 0.0;
  std::string phase = "I";
};

void run_bandwidth(const BandwidthArgs& a, Run& run) {
  std::vector<GapSeries> series;
  for (double d : double_list(a.ds)) {
    BandWidthRequest r;
    r.xi = a.xi;
    r.mu = a.mu;
    r.Ns = int_list(a.Ns);
    r.d = d;
    r.ell0 = a.ell0;
    r.N0 = a.N0;
    r.eps = a.eps;
    r.phase = a.phase == "II" ? BandPhase::II : BandPhase::I;
    series.push_back(band_gap_width(r));
  }
  write_gaps(series, run);
}

struct QuenchArgs {
  std::string Ns = "50:170:20";
  std::string xi = "0.6:0.8";
  std::string mu = "0:0";
  double q1 = -0.63;
  std::string keep = "0:5:1";
  std::string observables = "C1,C2,C3,C4,K1,K2,K3,K4,alpha1,alpha2";
  double gamma = kDefaultGamma;
  double step = 0.5;
  double horizon = 5e3;
  int refine = 2;
  double series_stop = 40.0;
  double series_step = 0.05;
  double zero_tol = kDefaultZeroTol;
};

void run_quench(const QuenchArgs& a, Run& run) {
  const auto [xi_i, xi_f] = double_pair(a.xi);
  const auto [mu_i, mu_f] = double_pair(a.mu);
  const std::vector<int> Ns = int_list(a.Ns);
  const std::vector<std::string> obs = split(a.observables, ',');
  for (const auto& o : obs) QuenchObservable::parse(o);

  QuenchSpec spec;
  spec.initial = {Ns.front(), xi_i, mu_i};
  spec.final_ = {Ns.front(), xi_f, mu_f};
  spec.state = {StateKind::Truncated, xi_i, a.q1, int_set(a.keep)};
  spec.grid = {0.0, a.horizon, a.step};
  spec.zero_tol = a.zero_tol;

  // Time series for plotting.
  io::CsvWriter q({"t", "observable", "re", "im"});
  const std::vector<double> times = TimeGrid{0.0, a.series_stop, a.series_step}.times();
  for (int N : Ns) {
    const QuenchEvolver ev({N, xi_f, mu_f}, prepare_state(spec.state, N));
    const std::string tag = "[N=" + std::to_string(N) + "]";
    for (const auto& name : obs) {
      const QuenchObservable o = QuenchObservable::parse(name);
      if (o.is_angle) {
        const AngleSeries s = angle_series(ev, o.n, times);
        for (std::size_t k = 0; k < times.size(); ++k) q.row(times[k], name + tag, s.wrapped.values[k].real(), 0.0);
        for (std::size_t k = 0; k < times.size(); ++k)
          q.row(times[k], name + "_unwrapped" + tag, s.unwrapped.values[k].real(), 0.0);
        if (!s.undefined_at.empty())
          std::cerr << "warning: " << name << tag << ": |<D+^n>| < 1e-12 at " << s.undefined_at.size()
                    << " samples, angle undefined there\n";
      } else {
        const auto f = quench_trace(ev, o, a.zero_tol);
        for (double t : times) q.row(t, name + tag, f(t), 0.0);
      }
    }
  }
  run.save("quench.csv", q);

  const QuenchSweep sweep = quench_tau_star(spec, Ns, obs, a.gamma, a.refine);
  io::CsvWriter ts({"N", "observable", "tau_star", "resolved"});
  for (const auto& r : sweep.rows) ts.row(r.N, r.observable, r.estimate.tau_star, r.estimate.resolved ? 1 : 0);
  run.save("taustar.csv", ts);
  io::CsvWriter fit({"observable", "b", "r2"});
  for (const auto& name : obs) {
    auto it = sweep.fits.find(name);
    if (it != sweep.fits.end()) {
      fit.row(name, it->second.exponent, it->second.r2);
    } else {
      std::cerr << "warning: " << name << ": " << sweep.fit_errors.at(name) << "\n";
      fit.row(name, std::nan(""), std::nan(""));
    }
  }
  run.save("taustar_fit.csv", fit);
}

struct ClassicalArgs {
  std::string xi = "0.6:0.8";
  std::string mu = "0:0";
  double q1 = -0.63;
  double t_end = 1e3;
  double dt = 1e-3;
  int stride = 100;
  std::string powers = "1";
};

void run_classical(const ClassicalArgs& a, Run& run) {
  const auto [xi_i, xi_f] = double_pair(a.xi);
  const auto [mu_i, mu_f] = double_pair(a.mu);
  (void)mu_i;  // the initial point sits on the ground manifold, which does not depend on mu
  IntegrationOptions opt;
  opt.dt = a.dt;
  opt.stride = a.stride;
  const PhasePoint x0 = manifold_point(xi_i, a.q1);
  const ClassicalParams c{xi_f, mu_f};
  const Trajectory tr = integrate(x0, c, a.t_end, opt);

  const std::vector<int> ns = int_list(a.powers);
  std::vector<std::string> header{"t", "q1", "p1", "q2", "p2"};
  std::vector<std::vector<std::complex<double>>> d;
  for (int n : ns) {
    header.push_back("re_dplus_" + std::to_string(n));
    header.push_back("im_dplus_" + std::to_string(n));
    d.push_back(classical_dplus_power(tr, n));
  }
  io::CsvWriter w(header);
  for (std::size_t k = 0; k < tr.points.size(); ++k) {
    const auto& p = tr.points[k];
    std::vector<io::Cell> row{tr.times[k], p.q1, p.p1, p.q2, p.p2};
    for (const auto& series : d) {
      row.emplace_back(series[k].real());
      row.emplace_back(series[k].imag());
    }
    w.add(row);
  }
  run.save("classical_traj.csv", w);
  run.extra["energy"] = classical_energy(x0, c);
  run.extra["initial_angle_over_pi"] = wrap_angle(std::arg(classical_dplus(x0))) / std::numbers::pi;
}

struct Table1Args {
  int N = 150;
  double xi = 0.6;
  double q1 = -0.63;
  double zero_tol = kDefaultZeroTol;
};

void run_table1(const Table1Args& a, Run& run) {
  io::CsvWriter w({"state", "observable", "re", "im"});
  for (const SignTable& t : table1(a.N, a.xi, a.q1, a.zero_tol)) {
    for (int n = 1; n <= 4; ++n) w.row(t.state, "C" + std::to_string(n), t.C[n - 1], 0.0);
    for (int n = 1; n <= 4; ++n) w.row(t.state, "K" + std::to_string(n), t.K[n - 1], 0.0);
    w.row(t.state, std::string("D+/N"), t.dplus_per_N.real(), t.dplus_per_N.imag());
  }
  run.save("table1.csv", w);
}

struct AngleArgs {
  std::string Ns = "60:150:10";
  double xi = 0.6;
  double q1 = -0.63;
  int calibration_N = 150;
  std::string target_obs = "C2";
  double target = -0.293;
  double a = -1.0;
  bool measure = true;
};

void run_angle_model(const AngleArgs& a, Run& run) {
  AngleModelRequest r;
  r.xi = a.xi;
  r.q1 = a.q1;
  r.calibration_N = a.calibration_N;
  const QuenchObservable t = QuenchObservable::parse(a.target_obs);
  if (t.is_angle) throw std::invalid_argument("--target-obs must be C<n> or K<n>");
  r.target = {t.n, t.kind, a.target};
  r.Ns = int_list(a.Ns);
  r.measure = a.measure;
  r.a_override = a.a;
  const AngleModelRun res = angle_model_run(r);
  io::CsvWriter w({"state", "N", "n", "kind", "prediction", "measured"});
  for (const auto& row : res.rows)
    w.row(row.state, row.N, row.n, std::string(1, sign_label(row.kind)), row.prediction, row.measured);
  run.save("angle_model.csv", w);
  run.extra["mean_angle_over_pi"] = res.mean / std::numbers::pi;
  run.extra["a"] = res.calibration.a;
  run.extra["calibration_residual"] = res.calibration.residual;
}

// ---------------------------------------------------------------------------
// Config file merge: entries become --key=value arguments placed before the
// command-line arguments, and every option keeps its last value.

std::vector<std::string> config_arguments(const io::ConfigFile& cfg, const CLI::App& app, const std::string& active) {
  std::vector<std::string> out;
  for (const auto& e : cfg.entries) {
    const std::string target = e.section.empty() ? active : e.section;
    const CLI::App* sub = nullptr;
    try {
      sub = app.get_subcommand(target);
    } catch (const CLI::OptionNotFound&) {
      throw io::ConfigError(cfg.where(e) + ": unknown section [" + e.section + "]");
    }
    if (sub->get_option_no_throw("--" + e.key) == nullptr || e.key == "help")
      throw io::ConfigError(cfg.where(e) + ": unknown key '" + e.key + "' for '" + target + "'");
    if (target == active) out.push_back("--" + e.key + "=" + e.value);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sign operators, spectra, quenches and classical dynamics of the 2D vibron model"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.add_option("--config", config_path, "key = value file with [subcommand] sections");

  const char* env_root = std::getenv("VIBRON_OUTPUT_ROOT");
  const std::string default_root = env_root && *env_root ? env_root : "results";
  std::map<std::string, std::string> out_dirs;
  auto add_out = [&](CLI::App* s) {
    out_dirs[s->get_name()] = (fs::path(default_root) / s->get_name()).string();
    s->add_option("--out", out_dirs[s->get_name()], "output directory")->capture_default_str();
  };

  SpectrumArgs sp;
  auto* c_spec = app.add_subcommand("spectrum", "level flow (E - E_GS)/N along a xi grid");
  c_spec->add_option("--N", sp.N)->capture_default_str();
  c_spec->add_option("--mu", sp.mu)->capture_default_str();
  c_spec->add_option("--xi-grid", sp.xi_grid, "start:stop:step or a comma list")->capture_default_str();
  c_spec->add_option("--ells", sp.ells)->capture_default_str();
  add_out(c_spec);

  GapsArgs gp;
  auto* c_gaps = app.add_subcommand("gaps", "bottom (0,1) and top (0,2), (1,3) degeneracy gaps vs N");
  c_gaps->add_option("--N", gp.Ns)->capture_default_str();
  c_gaps->add_option("--xi", gp.xi)->capture_default_str();
  c_gaps->add_option("--mu", gp.mu)->capture_default_str();
  add_out(c_gaps);

  BandwidthArgs bw;
  auto* c_bw = app.add_subcommand("bandwidth", "gap to sector l(d) = [l0 (N/N0)^d] vs N");
  c_bw->add_option("--N", bw.Ns)->capture_default_str();
  c_bw->add_option("--d", bw.ds)->capture_default_str();
  c_bw->add_option("--ell0", bw.ell0)->capture_default_str();
  c_bw->add_option("--N0", bw.N0)->capture_default_str();
  c_bw->add_option("--eps", bw.eps)->capture_default_str();
  c_bw->add_option("--xi", bw.xi)->capture_default_str();
  c_bw->add_option("--mu", bw.mu)->capture_default_str();
  c_bw->add_option("--phase", bw.phase)->check(CLI::IsMember({"I", "II"}))->capture_default_str();
  add_out(c_bw);

  QuenchArgs qa;
  auto* c_q = app.add_subcommand("quench", "sign operators and angles after a sudden quench, tau*(N)");
  c_q->add_option("--N", qa.Ns)->capture_default_str();
  c_q->add_option("--xi", qa.xi, "initial:final")->capture_default_str();
  c_q->add_option("--mu", qa.mu, "initial:final")->capture_default_str();
  c_q->add_option("--q1", qa.q1)->capture_default_str();
  c_q->add_option("--keep", qa.keep, "sectors kept in the initial state")->capture_default_str();
  c_q->add_option("--observables", qa.observables)->capture_default_str();
  c_q->add_option("--gamma", qa.gamma)->capture_default_str();
  c_q->add_option("--step", qa.step, "coarse time step of the tau* scan")->capture_default_str();
  c_q->add_option("--horizon", qa.horizon)->capture_default_str();
  c_q->add_option("--refine", qa.refine, "tenfold refinements around a crossing")->capture_default_str();
  c_q->add_option("--series-stop", qa.series_stop)->capture_default_str();
  c_q->add_option("--series-step", qa.series_step)->capture_default_str();
  c_q->add_option("--zero-tol", qa.zero_tol)->capture_default_str();
  add_out(c_q);

  ClassicalArgs ca;
  auto* c_cl = app.add_subcommand("classical", "RK4 trajectory after a classical quench");
  c_cl->add_option("--xi", ca.xi, "initial:final")->capture_default_str();
  c_cl->add_option("--mu", ca.mu, "initial:final")->capture_default_str();
  c_cl->add_option("--q1", ca.q1)->capture_default_str();
  c_cl->add_option("--t-end", ca.t_end)->capture_default_str();
  c_cl->add_option("--dt", ca.dt)->capture_default_str();
  c_cl->add_option("--stride", ca.stride)->capture_default_str();
  c_cl->add_option("--n", ca.powers, "powers of D+ to record")->capture_default_str();
  add_out(c_cl);

  Table1Args ta;
  auto* c_t = app.add_subcommand("table1", "sign expectations of the coherent and three-fold states");
  c_t->add_option("--N", ta.N)->capture_default_str();
  c_t->add_option("--xi", ta.xi)->capture_default_str();
  c_t->add_option("--q1", ta.q1)->capture_default_str();
  c_t->add_option("--zero-tol", ta.zero_tol)->capture_default_str();
  add_out(c_t);

  AngleArgs aa;
  auto* c_a = app.add_subcommand("angle-model", "Gaussian angle model: calibration and scaling curves");
  c_a->add_option("--N", aa.Ns)->capture_default_str();
  c_a->add_option("--xi", aa.xi)->capture_default_str();
  c_a->add_option("--q1", aa.q1)->capture_default_str();
  c_a->add_option("--calibration-N", aa.calibration_N)->capture_default_str();
  c_a->add_option("--target-obs", aa.target_obs)->capture_default_str();
  c_a->add_option("--target", aa.target)->capture_default_str();
  c_a->add_option("--a", aa.a, "fixed width constant; negative means calibrate")->capture_default_str();
  c_a->add_flag("--measure,!--no-measure", aa.measure, "also compute the quantum values")->capture_default_str();
  add_out(c_a);

  // Locate the subcommand and the config file before the real parse.
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string active, cfg_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) cfg_file = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) cfg_file = args[i].substr(9);
    else if (active.empty() && args[i].rfind("-", 0) != 0 && (i == 0 || args[i - 1] != "--config")) {
      for (const auto* s : app.get_subcommands({})) {
        if (s->get_name() == args[i]) active = args[i];
      }
    }
  }

  std::vector<std::string> merged;
  if (!cfg_file.empty() && !active.empty()) {
    try {
      const io::ConfigFile cfg = io::load_config(cfg_file);
      const auto extra = config_arguments(cfg, app, active);
      // Layout: [global args..., subcommand, config args..., subcommand args...]
      auto pos = std::find(args.begin(), args.end(), active);
      merged.assign(args.begin(), pos + 1);
      merged.insert(merged.end(), extra.begin(), extra.end());
      merged.insert(merged.end(), pos + 1, args.end());
    } catch (const io::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
  } else {
    merged = args;
  }

  try {
    std::vector<std::string> reversed(merged.rbegin(), merged.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run{sub->get_name(), out_dirs.at(sub->get_name()), {}, nlohmann::json::object()};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fs::create_directories(run.out_dir);
    if (sub == c_spec) run_spectrum(sp, run);
    else if (sub == c_gaps) run_gaps(gp, run);
    else if (sub == c_bw) run_bandwidth(bw, run);
    else if (sub == c_q) run_quench(qa, run);
    else if (sub == c_cl) run_classical(ca, run);
    else if (sub == c_t) run_table1(ta, run);
    else if (sub == c_a) run_angle_model(aa, run);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(run, *sub, merged, cfg_file, secs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& o : run.outputs) std::cout << (run.out_dir / o).string() << "\n";
  return 0;
}
