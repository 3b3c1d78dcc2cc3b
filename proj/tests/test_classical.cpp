#include <gtest/gtest.h>

#include <random>

#include "vibron/classical.hpp"
#include "vibron/experiments.hpp"
#include "vibron/ladder_ops.hpp"
#include "vibron/states.hpp"

using namespace vibron;
using std::numbers::pi;

namespace {

std::vector<double> angles(const std::vector<std::complex<double>>& z) {
  std::vector<double> a;
  for (const auto& v : z) a.push_back(std::arg(v));
  return a;
}

double circular_std(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m += circular_difference(x, a[0]);
  m /= a.size();
  double v = 0.0;
  for (double x : a) v += std::pow(circular_difference(x, a[0]) - m, 2);
  return std::sqrt(v / a.size());
}

PhasePoint random_interior(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  return {u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST(Energy, ReferencePoints) {
  EXPECT_DOUBLE_EQ(classical_energy(PhasePoint{}, {0.6, 0.0}), 0.6);
  EXPECT_NEAR(classical_energy(manifold_point(0.6, -0.63), {0.8, 0.0}), 0.1056, 5e-5);
  EXPECT_NEAR(classical_energy(manifold_point(0.6, 0.2), {0.6, 0.0}), 0.18333333333333333, 1e-14);
  EXPECT_THROW(classical_energy(PhasePoint{1.0, 1.0, 0.5, 0.0}, {0.6, 0.0}), std::invalid_argument);
}

TEST(Radius, Branches) {
  EXPECT_EQ(ground_radius(0.1), 0.0);
  EXPECT_EQ(ground_radius(0.2), 0.0);
  EXPECT_NEAR(ground_radius(0.6), 5.0 / 6.0, 1e-15);
}

TEST(Rhs, StationaryPoints) {
  for (double q1 : {-0.63, 0.1, 0.55}) {
    const auto v = hamilton_rhs(manifold_point(0.6, q1), {0.6, 0.0});
    for (double c : v) EXPECT_NEAR(c, 0.0, 1e-13);
  }
  for (double c : hamilton_rhs(PhasePoint{}, {0.7, 0.2})) EXPECT_EQ(c, 0.0);
}

TEST(Rhs, FiniteDifferenceGradient) {
  std::mt19937 rng(11);
  const double h = 1e-6;
  for (int i = 0; i < 1000; ++i) {
    const PhasePoint x = random_interior(rng);
    const ClassicalParams c{std::uniform_real_distribution<double>(0, 1)(rng),
                            std::uniform_real_distribution<double>(-1, 1)(rng)};
    auto fd = [&](double PhasePoint::*field) {
      PhasePoint a = x, b = x;
      a.*field += h;
      b.*field -= h;
      return (classical_energy_unchecked(a, c) - classical_energy_unchecked(b, c)) / (2 * h);
    };
    const auto v = hamilton_rhs(x, c);
    const std::array<double, 4> want{fd(&PhasePoint::p1), -fd(&PhasePoint::q1), fd(&PhasePoint::p2),
                                     -fd(&PhasePoint::q2)};
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(v[k], want[k], 1e-6 * std::max(1.0, std::abs(want[k])));
  }
}

TEST(Dplus, ClassicalValues) {
  const auto d = classical_dplus(manifold_point(0.6, -0.63));
  // large-N limit; the tabulated 0.680 - 0.713i belongs to the N = 150 coherent state
  EXPECT_NEAR(d.real(), 0.680, 1e-3);
  EXPECT_NEAR(d.imag(), -0.713, 1e-3);
  EXPECT_NEAR(manifold_angle(0.6, 0.55) / pi, 1.294, 1e-3);
  EXPECT_EQ(classical_dplus(PhasePoint{}), std::complex<double>(0.0));
}

TEST(Dplus, CoherentStateApproachesClassicalValue) {
  const PhasePoint x = manifold_point(0.6, -0.63);
  const auto want = classical_dplus(x);
  double prev = 1e9;
  for (int N : {20, 40, 80, 150}) {
    const auto got = graded_expectation(dplus_operator(N), coherent_state(N, x)) / double(N);
    const double dev = std::abs(got - want);
    EXPECT_LT(dev, prev) << N;
    prev = dev;
  }
}

TEST(Integrate, StationaryAndConfinement) {
  const PhasePoint x = manifold_point(0.6, 0.3);
  const Trajectory tr = integrate(x, {0.6, 0.0}, 10.0);
  for (const auto& p : tr.points) {
    EXPECT_NEAR(p.q1, x.q1, 1e-12);
    EXPECT_NEAR(p.q2, x.q2, 1e-12);
  }
  EXPECT_THROW(integrate(x, {0.6, 0.0}, 1.0, {0.0}), std::invalid_argument);
}

TEST(Integrate, FourthOrderDriftScaling) {
  const PhasePoint x = manifold_point(0.6, -0.63);
  const ClassicalParams c{0.8, 0.3};
  auto drift = [&](double dt) {
    IntegrationOptions o;
    o.dt = dt;
    o.stride = 1;
    o.energy_tol = o.ell_tol = 1.0;
    const Trajectory tr = integrate(x, c, 20.0, o);
    double worst = 0.0;
    for (const auto& p : tr.points) worst = std::max(worst, std::abs(classical_energy(p, c) - classical_energy(x, c)));
    return worst;
  };
  const double ratio = drift(0.04) / drift(0.02);
  EXPECT_GT(ratio, 10.0);
  EXPECT_LT(ratio, 40.0);
}

TEST(Integrate, ToleranceBreachAborts) {
  IntegrationOptions o;
  o.dt = 0.3;
  o.energy_tol = 1e-12;
  EXPECT_THROW(integrate(manifold_point(0.6, -0.63), {0.8, 0.3}, 50.0, o), NumericalError);
}

TEST(Trajectories, AngleFrozenWithoutField) {
  for (double q1 : {-0.63, 0.55}) {
    const PhasePoint x = manifold_point(0.6, q1);
    const ClassicalParams c{0.8, 0.0};
    const Trajectory tr = integrate(x, c, 1000.0);
    const auto d = classical_dplus_power(tr, 1);
    EXPECT_LT(circular_std(angles(d)), 1e-6);
    for (const auto& p : tr.points) {
      EXPECT_NEAR(classical_energy(p, c), classical_energy(x, c), 1e-8);
      EXPECT_NEAR(classical_ell(p), 0.0, 1e-8);
      EXPECT_LE(p.omega2(), 2.0 + 1e-9);
    }
    const auto d2 = classical_dplus_power(tr, 2);
    EXPECT_NEAR(circular_difference(std::arg(d2.back()), 2 * manifold_angle(0.6, q1)), 0.0, 1e-6);
  }
}

TEST(Trajectories, FieldRotatesAngle) {
  const PhasePoint x = manifold_point(0.6, 0.55);
  const ClassicalParams c{0.8, 0.3};
  const Trajectory tr = integrate(x, c, 1000.0);
  const auto d = classical_dplus_power(tr, 1);
  double wind = 0.0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    wind += circular_difference(std::arg(d[k]), std::arg(d[k - 1]));
    EXPECT_GT(std::abs(d[k]), 0.0);
  }
  EXPECT_GT(std::abs(wind), 2 * pi);
  for (const auto& p : tr.points) EXPECT_NEAR(classical_ell(p), classical_ell(x), 1e-8);
}

TEST(Trajectories, AnnulusWidensWithPower) {
  IntegrationOptions o;
  o.stride = 10;
  const Trajectory tr = integrate(manifold_point(0.6, -0.63), {0.8, 0.0}, 100.0, o);
  auto width = [&](int n) {
    double lo = 1e9, hi = 0;
    for (const auto& z : classical_dplus_power(tr, n)) lo = std::min(lo, std::abs(z)), hi = std::max(hi, std::abs(z));
    return hi - lo;
  };
  EXPECT_LT(width(1), width(4));
}
