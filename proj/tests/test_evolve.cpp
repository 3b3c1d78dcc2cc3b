#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "vibron/evolve.hpp"
#include "vibron/experiments.hpp"

using namespace vibron;
using std::numbers::pi;

namespace {

QuantumState fig5_state(int N) {
  return prepare_state({StateKind::Truncated, 0.6, -0.63, {0, 1, 2, 3, 4, 5}}, N);
}

std::vector<double> grid(double stop, double step) { return TimeGrid{0.0, stop, step}.times(); }

}  // namespace

TEST(Expand, EigenstateHasSingleCoefficient) {
  const ModelParams p{12, 0.8, 0.0};
  const Spectra s = diagonalize_sectors(p, {2});
  QuantumState psi(12);
  psi.set_sector(2, s.at(2).eigenvectors.col(1).cast<cplx>());
  const auto c = expand_in_eigenbasis(psi, s);
  EXPECT_NEAR(std::abs(c.at(2)[1]), 1.0, 1e-12);
  EXPECT_NEAR(c.at(2).squaredNorm(), 1.0, 1e-12);
}

TEST(Expand, TruncatedSupportAndNorm) {
  const QuenchEvolver ev({40, 0.8, 0.0}, fig5_state(40));
  EXPECT_EQ(ev.support(), (std::set<int>{0, 1, 2, 3, 4, 5}));
  double s = 0.0;
  for (const auto& [ell, c] : ev.coefficients()) s += c.squaredNorm();
  EXPECT_NEAR(s, 1.0, 1e-10);
}

TEST(Evolve, MatchesMatrixExponential) {
  const int N = 8;
  const ModelParams p{N, 0.8, 0.3};
  const QuantumState psi = coherent_state(N, PhasePoint{0.3, 0.1, -0.5, 0.2});
  const QuenchEvolver ev(p, psi);
  const double t = 2.7;
  const QuantumState got = ev.state_at(t);
  for (const auto& [ell, v] : psi.sectors()) {
    const Eigen::MatrixXcd h = build_sector(p, ell).cast<cplx>();
    const Eigen::MatrixXcd u = (cplx(0.0, -t) * h).exp();
    EXPECT_LT((u * v - got.sector(ell)).norm(), 1e-11) << ell;
  }
}

TEST(Evolve, IdentityQuenchIsStationary) {
  const int N = 30;
  const ModelParams p{N, 0.6, 0.0};
  const Spectra s = diagonalize_sectors(p, {0, 1, 2});
  QuantumState psi(N);
  for (int ell : {0, 1, 2}) psi.set_sector(ell, s.at(ell).eigenvectors.col(3).cast<cplx>() / std::sqrt(3.0));
  const QuenchEvolver ev(p, psi);
  const auto d = evolve_expectation(ev, power_operator(dplus_operator(N), 1), grid(50, 5));
  // Different l in one band are not exactly degenerate at finite N, so only
  // a single eigenstate is strictly stationary.
  QuantumState single(N);
  single.set_sector(1, s.at(1).eigenvectors.col(3).cast<cplx>());
  const QuenchEvolver ev1(p, single);
  const SignOperator c1 = sign_operator(make_observable(ObservableKind::X, 1, N));
  const auto sc = evolve_expectation(ev1, c1, grid(50, 5));
  for (const auto& v : sc.values) EXPECT_NEAR(v.real(), sc.values[0].real(), 1e-10);
  EXPECT_EQ(d.size(), 11u);
}

TEST(Evolve, ConservationLaws) {
  const QuenchEvolver ev({50, 0.8, 0.3}, fig5_state(50));
  const auto times = grid(200, 7.3);
  const auto L = evolve_angular_momentum(ev, times);
  const auto H = evolve_energy(ev, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    EXPECT_NEAR(L.values[k].real(), L.values[0].real(), 1e-10);
    EXPECT_NEAR(H.values[k].real(), H.values[0].real(), 1e-10 * std::max(1.0, std::abs(H.values[0].real())));
    EXPECT_NEAR(ev.state_at(times[k]).norm(), 1.0, 1e-10);
  }
}

TEST(Evolve, ObservablesAgreeWithGradedPower) {
  const int N = 20;
  const QuenchEvolver ev({N, 0.8, 0.0}, fig5_state(N));
  const auto times = grid(10, 1.0);
  for (int n = 1; n <= 3; ++n) {
    const auto [x, y] = build_xy(n, {N, 0.8, 0.0});
    const auto d = evolve_expectation(ev, x.power, times);
    const auto xs = evolve_expectation(ev, x, times);
    const auto ys = evolve_expectation(ev, y, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double scale = std::max(1.0, std::abs(d.values[k]));
      EXPECT_NEAR(xs.values[k].real(), d.values[k].real(), 1e-13 * scale);
      EXPECT_NEAR(ys.values[k].real(), d.values[k].imag(), 1e-13 * scale);
    }
  }
}

TEST(Evolve, SignTrackerMatchesFullEvaluation) {
  const int N = 24;
  const QuenchEvolver ev({N, 0.8, 0.3}, fig5_state(N));
  for (int n = 1; n <= 4; ++n)
    for (ObservableKind k : {ObservableKind::X, ObservableKind::Y}) {
      const SignOperator s = sign_operator(make_observable(k, n, N));
      const auto f = ev.sign_tracker(s);
      for (double t : {0.0, 1.3, 17.0}) {
        const SignProbabilities a = f(t), b = s.probabilities(ev.state_at(t));
        EXPECT_NEAR(a.plus, b.plus, 1e-11);
        EXPECT_NEAR(a.minus, b.minus, 1e-11);
        EXPECT_NEAR(a.plus + a.zero + a.minus, 1.0, 1e-12);
      }
    }
}

TEST(Angle, InitialAngleOfClassicalState) {
  const QuenchEvolver ev({150, 0.6, 0.0}, coherent_state(150, manifold_point(0.6, -0.63)));
  const AngleSeries a = angle_series(ev, 1, {0.0});
  EXPECT_NEAR(a.wrapped.values[0].real() / pi, 1.742, 1e-3);
  EXPECT_TRUE(a.undefined_at.empty());
}

TEST(Angle, RejectsSymmetricState) {
  QuantumState psi(10);
  psi.set_sector(0, Eigen::VectorXcd::Unit(sector_dimension(10, 0), 0));
  const QuenchEvolver ev({10, 0.8, 0.0}, psi);
  EXPECT_THROW(angle_series(ev, 1, {0.0, 1.0}), std::invalid_argument);
}

TEST(Angle, WindsUnderField) {
  const QuenchEvolver ev({70, 0.8, 0.3}, fig5_state(70));
  const AngleSeries a = angle_series(ev, 2, grid(60, 0.05));
  const double span = a.unwrapped.values.back().real() - a.unwrapped.values.front().real();
  EXPECT_GT(std::abs(span), 2.0 * pi);
  for (const auto& v : a.wrapped.values) {
    EXPECT_GE(v.real(), 0.0);
    EXPECT_LT(v.real(), 2.0 * pi);
  }
}

TEST(TauStar, SyntheticSeries) {
  TimeSeries flat{"x", {}, {}};
  for (int k = 0; k < 10; ++k) flat.push(k, 0.3);
  EXPECT_FALSE(tau_star(flat).resolved);

  TimeSeries jump{"x", {}, {}};
  for (int k = 0; k < 10; ++k) jump.push(0.5 * k, k >= 6 ? 0.3 + 2 * kDefaultGamma : 0.3);
  const auto e = tau_star(jump);
  EXPECT_TRUE(e.resolved);
  EXPECT_DOUBLE_EQ(e.tau_star, 3.0);
}

TEST(TauStar, CircularDistance) {
  TimeSeries s{"a", {}, {}};
  s.push(0.0, 2.0 * pi - 1e-3);
  s.push(1.0, 1e-3);  // 2e-3 apart on the circle
  s.push(2.0, 0.1);
  EXPECT_DOUBLE_EQ(tau_star(s, kDefaultGamma, Distance::Circular).tau_star, 2.0);
  EXPECT_DOUBLE_EQ(tau_star(s, kDefaultGamma, Distance::Linear).tau_star, 1.0);
}

TEST(TauStar, RefinedSearchLocalizesCrossing) {
  const double t1 = 3.14159;
  const auto f = [&](double t) { return t > t1 ? 1.0 : 0.0; };
  const auto e = tau_star_search(f, {0.0, 100.0, 0.5}, kDefaultGamma, 2);
  EXPECT_TRUE(e.resolved);
  EXPECT_GT(e.tau_star, t1);
  EXPECT_LE(e.tau_star, t1 + 0.005 + 1e-12);
  EXPECT_FALSE(tau_star_search([](double) { return 0.0; }, {0.0, 10.0, 0.5}).resolved);
}

// Sign expectations stay frozen up to tau*, and so do P+ and P- separately.
TEST(Quench, PrethermalPlateauAndProbabilities) {
  const int N = 130;
  const QuenchEvolver ev({N, 0.8, 0.0}, fig5_state(N));
  const SignOperator& c1 = *cached_sign_operator(ObservableKind::X, 1, N);
  const auto f = ev.sign_tracker(c1);
  const auto e = tau_star_search([&](double t) { return f(t).expectation(); }, {0.0, 500.0, 0.5});
  ASSERT_TRUE(e.resolved);
  const SignProbabilities p0 = f(0.0);
  for (double t = 0.0; t < e.tau_star; t += 0.01) {
    const SignProbabilities p = f(t);
    EXPECT_LE(std::abs(p.expectation() - p0.expectation()), kDefaultGamma);
    EXPECT_LT(std::abs(p.plus - p0.plus), 2 * kDefaultGamma);
    EXPECT_LT(std::abs(p.minus - p0.minus), 2 * kDefaultGamma);
  }
}

TEST(LongTime, SingleSectorAverageVanishes) {
  const int N = 20;
  QuantumState psi = prepare_state({StateKind::Truncated, 0.6, -0.63, {2}}, N);
  const QuenchEvolver ev({N, 0.8, 0.0}, psi);
  const GradedOperator dp = dplus_operator(N);
  EXPECT_EQ(longtime_average([&](double t) { return ev.graded(dp, t); }, 100.0, 0.5), cplx(0.0));
}

TEST(LongTime, FieldQuenchAveragesOrderParameterAway) {
  const int N = 50;
  const QuenchEvolver ev({N, 0.8, 0.3}, fig5_state(N));
  const GradedOperator dp = dplus_operator(N);
  const cplx d0 = ev.graded(dp, 0.0);
  const cplx avg = longtime_average([&](double t) { return ev.graded(dp, t); }, 2000.0, 0.5);
  EXPECT_LT(std::abs(avg), 0.05 * std::abs(d0));
}
