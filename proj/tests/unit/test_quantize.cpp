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

#include <algorithm>
#include <cmath>

#include "quantquad/quantize.hpp"
#include "quantquad/subspace.hpp"

namespace quantquad {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Composite Simpson rule, used as an independent check of closed forms.
template <typename Fn>
double simpson(Fn&& fn, double a, double b, int steps = 20000) {
  const double h = (b - a) / steps;
  double acc = fn(a) + fn(b);
  for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * fn(a + i * h);
  return acc * h / 3.0;
}

std::vector<double> sorted_points(const Codebook& cb) {
  std::vector<double> v(cb.points.data(), cb.points.data() + cb.points.size());
  std::sort(v.begin(), v.end());
  return v;
}

TEST(Nearest, Examples) {
  const Codebook cb = make_scalar_codebook({0.25, 0.75});
  EXPECT_EQ(nearest(cb, Eigen::VectorXd::Constant(1, 0.3)).index, 0);
  EXPECT_EQ(nearest(cb, Eigen::VectorXd::Constant(1, 0.5)).index, 0);
  const Nearest hit = nearest(cb, Eigen::VectorXd::Constant(1, 0.75));
  EXPECT_EQ(hit.index, 1);
  EXPECT_EQ(hit.distance, 0.0);
  EXPECT_THROW(nearest(cb, Eigen::Vector2d(0.1, 0.2)), ConfigError);
}

TEST(Nearest, BatchedMatchesSingle) {
  const SampleSet pts = sample(StdNormal{3}, {1, 0}, 64);
  Codebook cb;
  cb.space = Space::euclidean(3);
  cb.points = pts.data;
  // Exact duplicates and midpoint ties for the tie rule.
  cb.points.col(10) = cb.points.col(3);
  const SampleSet xs = sample(StdNormal{3}, {2, 0}, 3000);
  Eigen::MatrixXd probe = xs.data;
  probe.col(0) = 0.5 * (cb.points.col(5) + cb.points.col(6));
  probe.col(1) = cb.points.col(10);
  const auto all = nearest_all(cb, probe);
  for (Index i = 0; i < probe.cols(); ++i) {
    const Nearest one = nearest(cb, probe.col(i));
    ASSERT_EQ(all[i].index, one.index) << i;
    ASSERT_EQ(all[i].distance, one.distance) << i;
  }
  EXPECT_EQ(all[1].index, 3);
}

TEST(Nearest, PathCodebookInL2) {
  const auto pq = product_quantizer_bm(64, 20);
  const SampleSet xs = sample(BrownianKL{20, default_grid()}, {3, 0}, 500);
  const auto all = nearest_all(pq.codebook, xs.data);
  for (Index i = 0; i < xs.count(); ++i) {
    const Nearest one = nearest(pq.codebook, xs.data.col(i));
    ASSERT_EQ(all[i].index, one.index);
    ASSERT_NEAR(all[i].distance, one.distance, 1e-15);
  }
}

TEST(Distortion, UniformTwoPoint) {
  const Codebook cb = make_scalar_codebook({0.25, 0.75});
  const auto d1 = distortion(cb, UniformCube{1}, 1.0, 200000, {1, 0});
  EXPECT_NEAR(d1.value, 0.125, 3.0 * d1.std_error);
  const auto d2 = distortion(cb, UniformCube{1}, 2.0, 200000, {2, 0});
  EXPECT_NEAR(d2.value, 1.0 / (4.0 * std::sqrt(3.0)), 3.0 * d2.std_error);
  EXPECT_THROW(distortion(cb, UniformCube{1}, 2.0, 10, {2, 0}), ConfigError);
}

TEST(Distortion, HalfNormal) {
  const Codebook cb = make_scalar_codebook({0.0});
  const auto d = distortion(cb, StdNormal{1}, 1.0, 200000, {3, 0});
  EXPECT_NEAR(d.value, std::sqrt(2.0 / kPi), 3.0 * d.std_error);
}

TEST(Distortion, FromDistancesDeltaMethod) {
  const auto d = distortion_from_distances({1.0, 1.0, 1.0, 1.0}, 2.0);
  EXPECT_EQ(d.value, 1.0);
  EXPECT_EQ(d.std_error, 0.0);
  EXPECT_EQ(d.sample_count, 4);
}

TEST(VoronoiWeights, Examples) {
  Codebook a = make_scalar_codebook({0.25, 0.75});
  const WeightReport wa = voronoi_weights(a, UniformCube{1}, 100000, {1, 0});
  EXPECT_NEAR(wa.weights[0], 0.5, 3.0 * wa.std_error[0]);
  EXPECT_EQ(wa.weights.sum(), 1.0);
  ASSERT_TRUE(a.weights.has_value());
  Codebook b = make_scalar_codebook({0.0, 0.5});
  const WeightReport wb = voronoi_weights(b, UniformCube{1}, 100000, {2, 0});
  EXPECT_NEAR(wb.weights[0], 0.25, 3.0 * wb.std_error[0]);
  EXPECT_NEAR(wb.weights[1], 0.75, 3.0 * wb.std_error[1]);
  Codebook c = make_scalar_codebook({0.3});
  EXPECT_EQ(voronoi_weights(c, UniformCube{1}, 1000, {3, 0}).weights[0], 1.0);
  Codebook far = make_scalar_codebook({0.5, 5.0});
  EXPECT_EQ(voronoi_weights(far, UniformCube{1}, 1000, {3, 0}).empty_cells, std::vector<Index>{1});
}

TEST(Codebook, Validation) {
  Codebook cb = make_scalar_codebook({0.1, 0.2});
  cb.weights = Eigen::Vector2d(0.5, 0.6);
  EXPECT_THROW(cb.validate(), ConfigError);
  EXPECT_THROW(make_scalar_codebook({0.1, 0.1}).require_distinct(), ConfigError);
  Codebook bad = make_scalar_codebook({0.1});
  bad.norm = NormKind::L2;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Lloyd, UniformTwoPointsMedian) {
  LloydOptions o;
  o.pool_size = 1 << 22;
  o.restarts = 2;
  const LloydResult res = lloyd(UniformCube{1}, 2, 1.0, o, {7, 0});
  const auto c = sorted_points(res.codebook);
  EXPECT_NEAR(c[0], 0.25, 1e-3);
  EXPECT_NEAR(c[1], 0.75, 1e-3);
  EXPECT_EQ(res.codebook.order_r, 1.0);
  EXPECT_EQ(res.codebook.measure_tag, "uniform_cube:1");
}

TEST(Lloyd, NormalOneAndTwoPoints) {
  LloydOptions o;
  o.pool_size = 1 << 20;
  o.restarts = 2;
  const LloydResult one = lloyd(StdNormal{1}, 1, 2.0, o, {1, 0});
  EXPECT_NEAR(one.codebook.points(0, 0), 0.0, 1e-3 * 3);
  const LloydResult two = lloyd(StdNormal{1}, 2, 2.0, o, {2, 0});
  const auto c = sorted_points(two.codebook);
  EXPECT_NEAR(c[0], -std::sqrt(2.0 / kPi), 5e-3);
  EXPECT_NEAR(c[1], std::sqrt(2.0 / kPi), 5e-3);
}

TEST(Lloyd, HistoryNeverIncreases) {
  LloydOptions o;
  o.pool_size = 20000;
  o.restarts = 3;
  for (double r : {1.0, 2.0}) {
    for (bool fast : {true, false}) {
      o.fast_1d = fast;
      const LloydResult res = lloyd(StdNormal{1}, 6, r, o, {3, 0});
      for (std::size_t i = 1; i < res.history.size(); ++i) ASSERT_LE(res.history[i], res.history[i - 1]);
    }
  }
  o.pool_size = 5000;
  const LloydResult path = lloyd(BrownianKL{10, Grid::uniform(33)}, 5, 2.0, o, {4, 0});
  for (std::size_t i = 1; i < path.history.size(); ++i) ASSERT_LE(path.history[i], path.history[i - 1]);
  EXPECT_EQ(path.codebook.norm, NormKind::L2);
  const LloydResult plane = lloyd(UniformCube{2}, 9, 2.0, o, {5, 0});
  for (std::size_t i = 1; i < plane.history.size(); ++i) ASSERT_LE(plane.history[i], plane.history[i - 1]);
}

TEST(Lloyd, FastAndGeneralPathsAgree) {
  LloydOptions o;
  o.pool_size = 4000;
  o.restarts = 1;
  o.iters = 50;
  const LloydResult fast = lloyd(UniformCube{1}, 4, 2.0, o, {6, 0});
  o.fast_1d = false;
  const LloydResult slow = lloyd(UniformCube{1}, 4, 2.0, o, {6, 0});
  const auto a = sorted_points(fast.codebook), b = sorted_points(slow.codebook);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(Lloyd, Reproducible) {
  LloydOptions o;
  o.pool_size = 3000;
  const LloydResult a = lloyd(StdNormal{2}, 5, 2.0, o, {8, 0});
  const LloydResult b = lloyd(StdNormal{2}, 5, 2.0, o, {8, 0});
  EXPECT_EQ(a.codebook.points, b.codebook.points);
  EXPECT_EQ(a.history, b.history);
}

TEST(Lloyd, RejectsBadArguments) {
  LloydOptions o;
  o.pool_size = 100;
  EXPECT_THROW(lloyd(UniformCube{1}, 0, 2.0, o, {1, 0}), ConfigError);
  EXPECT_THROW(lloyd(UniformCube{1}, 200, 2.0, o, {1, 0}), ConfigError);
  EXPECT_THROW(lloyd(UniformCube{1}, 2, 3.0, o, {1, 0}), ConfigError);
}

TEST(GaussianQuantizer, SmallCases) {
  const Codebook one = scalar_gaussian_quantizer(1);
  EXPECT_EQ(one.points(0, 0), 0.0);
  const Codebook two = scalar_gaussian_quantizer(2);
  EXPECT_NEAR(two.points(0, 0), -std::sqrt(2.0 / kPi), 1e-12);
  EXPECT_NEAR(two.points(0, 1), std::sqrt(2.0 / kPi), 1e-12);
  EXPECT_NEAR(scalar_gaussian_distortion_sq(2), 1.0 - 2.0 / kPi, 1e-12);
  const auto mc = distortion(two, StdNormal{1}, 2.0, 200000, {1, 0});
  EXPECT_NEAR(mc.value * mc.value, 1.0 - 2.0 / kPi, 3.0 * 2.0 * mc.value * mc.std_error);
}

TEST(GaussianQuantizer, CentroidConditionByQuadrature) {
  auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); };
  for (Index n : {3, 5, 8}) {
    const Codebook cb = scalar_gaussian_quantizer(n);
    double dist = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double lo = i == 0 ? -12.0 : 0.5 * (cb.points(0, i - 1) + cb.points(0, i));
      const double hi = i == n - 1 ? 12.0 : 0.5 * (cb.points(0, i) + cb.points(0, i + 1));
      const double mass = simpson(phi, lo, hi);
      const double mean = simpson([&](double z) { return z * phi(z); }, lo, hi) / mass;
      EXPECT_NEAR(cb.points(0, i), mean, 1e-9) << n << " " << i;
      EXPECT_NEAR((*cb.weights)[i], mass, 1e-9);
      const double c = cb.points(0, i);
      dist += simpson([&](double z) { return (z - c) * (z - c) * phi(z); }, lo, hi);
    }
    EXPECT_NEAR(scalar_gaussian_distortion_sq(n), dist, 1e-9);
  }
  EXPECT_THROW(scalar_gaussian_quantizer(0), ConfigError);
}

TEST(ProductQuantizer, SmallBudgets) {
  const auto one = product_quantizer_bm(1);
  EXPECT_EQ(one.size, 1);
  EXPECT_EQ(one.codebook.points.cwiseAbs().maxCoeff(), 0.0);
  const auto two = product_quantizer_bm(2);
  ASSERT_EQ(two.size, 2);
  EXPECT_EQ(two.levels[0], 2);
  EXPECT_EQ(two.levels[1], 1);
  const auto& g = *default_grid();
  const double s = std::sqrt(kl_eigenvalue(1)) * std::sqrt(2.0 / kPi);
  double worst = 0.0;
  for (Index j = 0; j < g.size(); ++j) {
    const double e1 = std::sqrt(2.0) * std::sin(kPi * g[j] / 2);
    worst = std::max(worst, std::abs(std::abs(two.codebook.points(j, 0)) - s * e1));
    worst = std::max(worst, std::abs(two.codebook.points(j, 0) + two.codebook.points(j, 1)));
  }
  EXPECT_LT(worst, 1e-4);
  EXPECT_EQ(two.codebook.weights->sum(), 1.0);
}

TEST(ProductQuantizer, LevelsAndDistortionShrink) {
  double prev = 1e9;
  for (Index n : {4, 16, 64, 256}) {
    const auto pq = product_quantizer_bm(n, 50);
    EXPECT_LE(pq.size, n);
    EXPECT_EQ(pq.size, pq.codebook.size());
    for (std::size_t i = 1; i < pq.levels.size(); ++i) EXPECT_LE(pq.levels[i], pq.levels[i - 1]);
    const auto d = distortion(pq.codebook, BrownianKL{50, default_grid()}, 2.0, 2000, {1, 0});
    EXPECT_LT(d.value, prev);
    prev = d.value;
  }
}

TEST(MidpointLattice, ExactCodebooks) {
  const Codebook four = midpoint_lattice_codebook(1, 4);
  EXPECT_EQ(sorted_points(four), (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
  const Codebook grid = midpoint_lattice_codebook(2, 6);
  EXPECT_EQ(grid.size(), 6);
  EXPECT_EQ(grid.weights->sum(), 1.0);
  // q^(2) of an a x b midpoint lattice: sqrt((1/a^2 + 1/b^2) / 12).
  const auto d = distortion(grid, UniformCube{2}, 2.0, 200000, {1, 0});
  EXPECT_NEAR(d.value, std::sqrt((1.0 / 9 + 1.0 / 4) / 12.0), 3.0 * d.std_error);
}

TEST(DistToCodebook, IsDistance) {
  const Codebook cb = make_scalar_codebook({0.25, 0.75});
  const Functional f = dist_to_codebook(cb);
  EXPECT_DOUBLE_EQ(f(Eigen::VectorXd::Constant(1, 0.6)), 0.15);
  EXPECT_EQ(f.lip_claim, 1.0);
}

}  // namespace
}  // namespace quantquad
