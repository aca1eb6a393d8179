// Copyright 2026 The quantquad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "quantquad/adversary.hpp"
#include "quantquad/quadrature.hpp"
#include "quantquad/stats.hpp"

namespace quantquad {
namespace {

constexpr double kPi = 3.14159265358979323846;

Codebook uniform_pair() {
  Codebook cb = make_scalar_codebook({0.25, 0.75}, 2.0, "uniform_cube:1");
  cb.weights = Eigen::Vector2d(0.5, 0.5);
  return cb;
}

Functional scalar(const char* name, double (*fn)(double)) {
  return {name, [fn](const Eigen::Ref<const Eigen::VectorXd>& x) { return fn(x[0]); }};
}

TEST(Voronoi, Examples) {
  const Codebook cb = uniform_pair();
  EXPECT_EQ(voronoi_quadrature(cb, scalar("x", [](double x) { return x; })).estimate, 0.5);
  const auto half_sq = voronoi_quadrature(cb, scalar("x2", [](double x) { return 0.5 * x * x; }));
  EXPECT_DOUBLE_EQ(half_sq.estimate, 5.0 / 32.0);
  EXPECT_NEAR(1.0 / 6.0 - half_sq.estimate, 1.0 / 96.0, 1e-15);
  EXPECT_EQ(voronoi_quadrature(cb, scalar("dev", [](double x) { return std::abs(x - 0.5); })).estimate, 0.25);
  EXPECT_EQ(half_sq.std_error, 0.0);
  EXPECT_EQ(half_sq.cost.oracle_cost, 2);
  EXPECT_THROW(voronoi_quadrature(make_scalar_codebook({0.1, 0.2}), functionals::constant(1)), ConfigError);
}

TEST(ClassicalMc, Examples) {
  const Functional x = functionals::coordinate(Space::euclidean(1), 0);
  const auto r = classical_mc(UniformCube{1}, x, 12, {1, 0});
  EXPECT_GT(r.std_error, 0.04);
  EXPECT_LT(r.std_error, 0.13);
  // Over many seeds the average reported stderr tracks 1/12.
  RunningStats se;
  for (std::uint64_t s = 0; s < 2000; ++s) se.add(classical_mc(UniformCube{1}, x, 12, {s, 0}).std_error);
  EXPECT_NEAR(se.mean(), 1.0 / 12.0, 0.004);
  const auto c = classical_mc(UniformCube{1}, functionals::constant(3.5), 50, {1, 0});
  EXPECT_EQ(c.estimate, 3.5);
  EXPECT_EQ(c.std_error, 0.0);
  const auto a = classical_mc(UniformCube{2}, functionals::coordinate(Space::euclidean(2), 1), 50, {4, 0});
  const auto b = classical_mc(UniformCube{2}, functionals::coordinate(Space::euclidean(2), 1), 50, {4, 0});
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.cost.oracle_cost, 100);
  EXPECT_THROW(classical_mc(UniformCube{1}, x, 1, {1, 0}), ConfigError);
}

TEST(ClassicalMc, Unbiased) {
  const Functional x = functionals::coordinate(Space::euclidean(1), 0);
  RunningStats est;
  for (std::uint64_t s = 0; s < 10000; ++s) est.add(classical_mc(UniformCube{1}, x, 4, {s, 9}).estimate);
  EXPECT_NEAR(est.mean(), 0.5, 3.0 * est.stderr_mean());
}

TEST(VrMc, InterpolationFixedPoint) {
  const Codebook cb = uniform_pair();
  const Functional step{"cell", [](const Eigen::Ref<const Eigen::VectorXd>& x) { return x[0] <= 0.5 ? 2.0 : -1.0; }};
  const auto r = vr_mc(cb, UniformCube{1}, step, 100, {1, 0});
  EXPECT_EQ(r.estimate, voronoi_quadrature(cb, step).estimate);
  EXPECT_EQ(r.std_error, 0.0);
  EXPECT_EQ(r.cardinality, 102);
}

TEST(VrMc, FourfoldVarianceReduction) {
  const Codebook cb = uniform_pair();
  const Functional x = functionals::coordinate(Space::euclidean(1), 0);
  const Index n = 8;
  RunningStats vr, mc;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    vr.add(vr_mc(cb, UniformCube{1}, x, n, {s, 1}).estimate);
    mc.add(classical_mc(UniformCube{1}, x, n, {s, 2}).estimate);
  }
  EXPECT_NEAR(vr.variance(), 1.0 / (48.0 * n), 0.1 / (48.0 * n));
  EXPECT_NEAR(mc.variance(), 1.0 / (12.0 * n), 0.1 / (12.0 * n));
  EXPECT_NEAR(mc.variance() / vr.variance(), 4.0, 0.15 * 4.0);
  EXPECT_NEAR(vr.mean(), 0.5, 3.0 * vr.stderr_mean());
}

TEST(VrMc, ErrorBoundForTwoPoints) {
  const Codebook cb = uniform_pair();
  const Functional x = functionals::coordinate(Space::euclidean(1), 0);
  RunningStats sq;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const double e = vr_mc(cb, UniformCube{1}, x, 2, {s, 3}).estimate - 0.5;
    sq.add(e * e);
  }
  const double rmse = std::sqrt(sq.mean());
  const double rmse_se = sq.stderr_mean() / (2.0 * rmse);
  const double q2 = 1.0 / (4.0 * std::sqrt(3.0));
  EXPECT_LE(rmse, 2.0 / std::sqrt(2.0) * q2 + 3.0 * rmse_se);
}

TEST(VrMc, CostUsesLargerDimension) {
  Codebook cb = uniform_pair();
  const auto r = vr_mc(cb, UniformCube{1}, functionals::constant(1), 10, {1, 0});
  EXPECT_EQ(r.cost.oracle_calls, 12);
  EXPECT_EQ(r.cost.oracle_cost, 12);
  cb.weights.reset();
  EXPECT_THROW(vr_mc(cb, UniformCube{1}, functionals::constant(1), 10, {1, 0}), ConfigError);
}

TEST(EulerMc, GbmMeanAndCost) {
  const auto spec = DiffusionSpec::gbm(0.1, 0.2, 1.0);
  const Functional end = functionals::coord_at(Space::paths(default_grid()), 1.0);
  const auto r = euler_mc(spec, end, 11, 1000000, {1, 0});
  EXPECT_NEAR(r.estimate, std::pow(1.01, 10), 3.0 * r.std_error);
  EXPECT_GT(std::abs(std::exp(0.1) - std::pow(1.01, 10)), 5e-4);
  const auto c = euler_mc(spec, end, 11, 100, {1, 0});
  EXPECT_EQ(c.cost.oracle_cost, 1100);
  EXPECT_EQ(euler_mc(spec, end, 83, 12, {1, 0}).cost.oracle_cost, 996);
}

TEST(EulerMc, NoNoiseNoError) {
  const auto spec = DiffusionSpec::from_families(Coefficient::linear(0.1), Coefficient::constant(0.0),
                                                 Eigen::VectorXd::Ones(1));
  const auto r = euler_mc(spec, functionals::coord_at(Space::paths(default_grid()), 1.0), 11, 50, {1, 0});
  EXPECT_EQ(r.std_error, 0.0);
}

TEST(Schedules, T8) {
  const Schedule a = t8_schedule(1000);
  EXPECT_EQ(a.n, 12);
  EXPECT_EQ(a.k, 83);
  const Schedule b = t8_schedule(1e4);
  EXPECT_EQ(b.n, 32);
  EXPECT_EQ(b.k, 303);
}

TEST(Schedules, Galg) {
  const Schedule a = galg_schedule(1e4, {2.0, 0.0});
  EXPECT_EQ(a.n, 10);
  EXPECT_EQ(a.k, 921);
  const Schedule b = galg_schedule(1e6, {2.0, 0.0});
  EXPECT_EQ(b.n, 72);
  EXPECT_EQ(b.k, 13815);
}

TEST(Schedules, FeasibleAndMonotone) {
  Schedule prev_t8{0, 0}, prev_g{0, 0};
  for (double N = 100; N <= 1e7; N *= 1.07) {
    const Schedule t = t8_schedule(N);
    const Schedule g = galg_schedule(N, {2.0, 0.0});
    ASSERT_LE(static_cast<double>(t.n * t.k), N);
    ASSERT_LE(static_cast<double>(g.n * g.k), N);
    ASSERT_GE(t.n, prev_t8.n);
    ASSERT_GE(t.k, prev_t8.k);
    ASSERT_GE(g.n, prev_g.n);
    ASSERT_GE(g.k, prev_g.k);
    prev_t8 = t;
    prev_g = g;
  }
}

TEST(Schedules, TooSmallBudgetNamesMinimum) {
  try {
    t8_schedule(5);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("minimum feasible N"), std::string::npos) << e.what();
  }
  EXPECT_THROW(t8_schedule(2.0), ConfigError);
  EXPECT_THROW(galg_schedule(10, {2.0, 0.0}), ConfigError);
}

TEST(GaussianSubspaceMc, Examples) {
  const Space path = Space::paths(default_grid());
  const auto end = gaussian_subspace_mc(make_kl_subspace(50), functionals::coord_at(path, 1.0), 20000, {1, 0});
  EXPECT_NEAR(end.estimate, 0.0, 3.0 * end.std_error);
  EXPECT_EQ(end.subspace_dim, 50);
  EXPECT_EQ(end.cost.oracle_cost, 50 * 20000);
  const auto blind = gaussian_subspace_mc(make_kl_subspace(4), subspace_blind_functional(make_kl_subspace(4)),
                                          1000, {2, 0});
  EXPECT_EQ(blind.estimate, 0.0);
  EXPECT_EQ(blind.std_error, 0.0);
  EXPECT_THROW(gaussian_subspace_mc(make_pl_subspace_uniform(default_grid(), 3), functionals::constant(1), 10, {1, 0}),
               ConfigError);
}

// E max over a grid of step h of Brownian motion is sqrt(2/pi) - 0.5826 sqrt(h)
// + o(sqrt(h)) (Asmussen, Glynn and Pitman); the constant is -zeta(1/2)/sqrt(2 pi).
TEST(GaussianSubspaceMc, SupOfBrownianMotion) {
  const Space path = Space::paths(default_grid());
  const auto r = gaussian_subspace_mc(make_kl_subspace(200), functionals::sup_value(path), 200000, {3, 0});
  const double on_grid = std::sqrt(2.0 / kPi) - 0.5826 / 16.0;
  EXPECT_NEAR(r.estimate, on_grid, 3.0 * r.std_error + 0.01);
}

TEST(OracleDim, RefusesLargerSubspace) {
  Functional f = functionals::coord_at(Space::paths(default_grid()), 1.0);
  f.oracle_dim = 5;
  EXPECT_NO_THROW(gaussian_subspace_mc(make_kl_subspace(5), f, 10, {1, 0}));
  EXPECT_THROW(gaussian_subspace_mc(make_kl_subspace(6), f, 10, {1, 0}), ConfigError);
  EXPECT_THROW(euler_mc(DiffusionSpec::gbm(0, 1, 0), f, 11, 10, {1, 0}), ConfigError);
}

TEST(Cost, DescribeLedger) {
  const auto r = classical_mc(UniformCube{2}, functionals::constant(1), 50, {1, 0});
  EXPECT_EQ(cost_of(r).oracle_cost, 100);
  EXPECT_NE(describe(r.cost).find("oracle_cost=100"), std::string::npos);
}

}  // namespace
}  // namespace quantquad
