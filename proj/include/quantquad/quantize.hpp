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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quantquad/functional.hpp"
#include "quantquad/measures.hpp"
#include "quantquad/paths.hpp"

namespace quantquad {

/// n points of a sample space, optionally with Voronoi cell weights.
struct Codebook {
  Space space = Space::euclidean(1);
  Eigen::MatrixXd points;                  // flat_size x n
  std::optional<Eigen::VectorXd> weights;  // mu(V_i), summing to 1
  double order_r = 1.0;
  NormKind norm = NormKind::Euclidean;
  std::string measure_tag;
  /// Dimension of the subspace holding the points, for cost accounting.
  /// Unset means the full ambient dimension.
  std::optional<Index> span_dim;

  Index size() const { return points.cols(); }
  Index cost_dim() const { return span_dim.value_or(space.flat_size()); }
  /// Checks shape, norm/space compatibility, weight normalisation (1e-12).
  void validate() const;
  /// Throws ConfigError if two points coincide.
  void require_distinct() const;
};

/// Codebook over R^1 from a list of values.
Codebook make_scalar_codebook(const std::vector<double>& values, double r = 1.0,
                              std::string measure_tag = "");

struct Nearest {
  Index index = 0;
  double distance = 0.0;
};

/// Closest codebook point in the codebook's norm; ties go to the lowest index.
Nearest nearest(const Codebook& cb, const Eigen::Ref<const Eigen::VectorXd>& x);
/// nearest() for every column of `samples`. Large L2/Euclidean codebooks use
/// an expanded inner-product search and re-check near ties exactly, so the
/// result matches nearest() column by column.
std::vector<Nearest> nearest_all(const Codebook& cb, const Eigen::Ref<const Eigen::MatrixXd>& samples);

/// Monte Carlo estimate of q^(r) = (E min_i ||X - x_i||^r)^(1/r).
struct DistortionEstimate {
  double value = 0.0;
  double std_error = 0.0;  // delta method on the r-th power distortion
  Index sample_count = 0;
  double order = 1.0;
};

DistortionEstimate distortion(const Codebook& cb, const MeasureSpec& measure, double r, Index M,
                              const SeedSpec& seed);
/// Distortion of a codebook on a fixed sample pool (columns).
DistortionEstimate distortion_on_pool(const Codebook& cb,
                                      const Eigen::Ref<const Eigen::MatrixXd>& pool, double r);
/// Same, from precomputed nearest distances.
DistortionEstimate distortion_from_distances(const std::vector<double>& dist, double r);

struct WeightReport {
  Eigen::VectorXd weights;
  Eigen::VectorXd std_error;       // binomial, per cell
  std::vector<Index> empty_cells;
  Index sample_count = 0;
};

/// Fraction of M samples falling in each Voronoi cell; stores the result in
/// cb.weights. The weights sum to exactly 1.
WeightReport voronoi_weights(Codebook& cb, const MeasureSpec& measure, Index M,
                             const SeedSpec& seed);

struct LloydOptions {
  Index iters = 200;
  double tol = 1e-10;  // relative distortion change
  Index restarts = 8;
  Index pool_size = 100000;
  /// Sorted-pool shortcut for one-dimensional Euclidean problems.
  bool fast_1d = true;
};

struct LloydResult {
  Codebook codebook;
  /// Empirical r-th power distortion on the pool after each iteration of the
  /// winning restart (non-increasing).
  std::vector<double> history;
  Index restart = 0;
  Index reseeded_cells = 0;
};

/// Lloyd iteration on a fixed pool of M samples: nearest assignment, then
/// cell mean (r = 2) or coordinatewise cell median (r = 1). A cell centre
/// only moves if that lowers the cell's cost, so the pool distortion never
/// increases. Empty cells are reseeded at the pool sample farthest from the
/// codebook. Returns the best of `restarts` random initialisations.
LloydResult lloyd(const MeasureSpec& measure, Index n, double r, const LloydOptions& opts,
                  const SeedSpec& seed, std::optional<NormKind> norm = std::nullopt);

/// Optimal n-level quantizer of N(0,1) for r = 2 (Lloyd iteration on the
/// exact Gaussian cell moments). Weights are the exact cell probabilities.
/// Cached by n.
Codebook scalar_gaussian_quantizer(Index levels);
/// E min_i (Z - c_i)^2 for scalar_gaussian_quantizer(levels), exact.
double scalar_gaussian_distortion_sq(Index levels);

struct ProductQuantizer {
  Codebook codebook;
  std::vector<Index> levels;  // per KL coordinate, non-increasing
  Index size = 1;             // product of levels
};

/// Product quantizer for Brownian motion in KL coordinates. Levels are added
/// greedily where lambda_l times the drop in scalar distortion is largest,
/// keeping the product of levels within n_budget.
ProductQuantizer product_quantizer_bm(Index n_budget, Index k_terms = 200,
                                      const GridPtr& grid = default_grid());

/// Midpoint lattice on [0,1]^d with exact weights 1/n. n is split into
/// per-axis counts as evenly as its prime factors allow.
Codebook midpoint_lattice_codebook(Index d, Index n);

/// f(x) = min_i ||x - x_i|| in the codebook norm.
Functional dist_to_codebook(const Codebook& cb);

}  // namespace quantquad
