#include <gtest/gtest.h>

#include <random>

#include "vibron/angle_mc.hpp"
#include "vibron/angle_model.hpp"
#include "vibron/experiments.hpp"

using namespace vibron;
using std::numbers::pi;

namespace {

const double kTableMean = manifold_angle(0.6, -0.63);

}  // namespace

TEST(Predict, DeltaLimitSingle) {
  const GaussianMixture m = GaussianMixture::single(0.3, 0.0, 150);
  EXPECT_EQ(predict_sign_expectation(m, 1, ObservableKind::X), 1.0);
  EXPECT_EQ(predict_sign_expectation(m, 2, ObservableKind::Y), 1.0);
  EXPECT_EQ(predict_sign_expectation(GaussianMixture::single(2.0, 1e-20, 150), 1, ObservableKind::X), -1.0);
}

TEST(Predict, DeltaLimitThreeFold) {
  const GaussianMixture q = GaussianMixture::three_fold(kTableMean, 0.0, 150);
  EXPECT_NEAR(predict_sign_expectation(q, 2, ObservableKind::X), -1.0 / 3, 1e-15);
  EXPECT_NEAR(predict_sign_expectation(q, 4, ObservableKind::X), 1.0 / 3, 1e-15);
}

TEST(Predict, LargeNReproducesDeltaLimit) {
  for (int n = 1; n <= 4; ++n)
    for (ObservableKind k : {ObservableKind::X, ObservableKind::Y}) {
      const double big = predict_sign_expectation(GaussianMixture::three_fold(kTableMean, 0.5, 1e8), n, k);
      const double lim = predict_sign_expectation(GaussianMixture::three_fold(kTableMean, 0.0, 1e8), n, k);
      EXPECT_NEAR(big, lim, 1e-6);
      const std::vector<double> allowed{-1.0, -1.0 / 3, 1.0 / 3, 1.0};
      double best = 1.0;
      for (double v : allowed) best = std::min(best, std::abs(lim - v));
      EXPECT_LT(best, 1e-12);
    }
}

TEST(Predict, MatchesMonteCarlo) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> mean(0, 2 * pi), a(0.05, 3.0), w(0.1, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    GaussianMixture m;
    m.a = a(rng);
    m.N = 40;
    double tot = 0;
    for (int k = 0; k < 3; ++k) {
      const double wk = w(rng);
      m.components.push_back({mean(rng), wk});
      tot += wk;
    }
    for (auto& c : m.components) c.weight /= tot;
    const int n = 1 + trial;
    for (ObservableKind k : {ObservableKind::X, ObservableKind::Y}) {
      const auto mc = monte_carlo_sign_expectation(m, n, k, 10'000'000, 1234 + trial);
      const double cf = predict_sign_expectation(m, n, k);
      EXPECT_LT(std::abs(cf - mc.mean), std::max(3 * mc.std_error, 1e-4)) << "trial " << trial;
      EXPECT_LT(std::abs(cf - mc.mean), 1e-3);
    }
  }
}

TEST(Predict, RotationSymmetries) {
  const GaussianMixture base{{{0.4, 0.5}, {2.5, 0.3}, {4.0, 0.2}}, 0.8, 30};
  GaussianMixture full = base, half = base;
  for (auto& c : full.components) c.mean += 2 * pi;
  for (auto& c : half.components) c.mean += pi;
  for (int n = 1; n <= 6; ++n)
    for (ObservableKind k : {ObservableKind::X, ObservableKind::Y}) {
      const double v = predict_sign_expectation(base, n, k);
      EXPECT_NEAR(predict_sign_expectation(full, n, k), v, 1e-12);
      EXPECT_NEAR(predict_sign_expectation(half, n, k), n % 2 ? -v : v, 1e-12);
      EXPECT_LE(std::abs(v), 1.0);
    }
}

TEST(Calibrate, RoundTripAndEdge) {
  const SignTarget t{2, ObservableKind::X, -0.25};
  const Calibration c = calibrate_a(t, GaussianMixture::single(kTableMean, 0.0, 150));
  GaussianMixture m = GaussianMixture::single(kTableMean, c.a, 150);
  EXPECT_NEAR(predict_sign_expectation(m, 2, ObservableKind::X), -0.25, 1e-9);

  const Calibration edge = calibrate_a({2, ObservableKind::X, -1.0}, GaussianMixture::single(kTableMean, 0.0, 150));
  EXPECT_TRUE(edge.at_lower_edge);
  EXPECT_EQ(edge.a, 0.0);

  EXPECT_THROW(calibrate_a({2, ObservableKind::X, 0.9}, GaussianMixture::single(kTableMean, 0.0, 150)),
               std::invalid_argument);
}

TEST(ScalingCurve, ClassicalApproachesMinusOne) {
  std::vector<int> Ns;
  for (int N = 50; N <= 1000000; N *= 4) Ns.push_back(N);
  const auto curve = predict_scaling_curve(GaussianMixture::single(kTableMean, 0.5, 1), 2, ObservableKind::X, Ns);
  for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i].second, curve[i - 1].second);
  EXPECT_NEAR(curve.back().second, -1.0, 1e-3);
  const auto q = predict_scaling_curve(GaussianMixture::three_fold(kTableMean, 0.5, 1), 4, ObservableKind::Y, {100000});
  EXPECT_NEAR(q[0].second, 1.0 / 3, 1e-6);
}
