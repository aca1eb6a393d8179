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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "quantquad/functional.hpp"
#include "quantquad/paths.hpp"
#include "quantquad/rng.hpp"
#include "quantquad/stats.hpp"

namespace quantquad {

/// Scalar coefficient family, applied per channel: constant c0, linear c0*x,
/// affine c0 + c1*x. Used as drift a(x) (vector) or as the diagonal of the
/// diffusion matrix b(x).
struct Coefficient {
  enum class Family { Constant, Linear, Affine };

  Family family = Family::Constant;
  double c0 = 0.0;
  double c1 = 0.0;

  static Coefficient constant(double c) { return {Family::Constant, c, 0.0}; }
  static Coefficient linear(double c) { return {Family::Linear, c, 0.0}; }
  static Coefficient affine(double c0, double c1) { return {Family::Affine, c0, c1}; }
  /// "constant:c", "linear:c" or "affine:c0:c1".
  static Coefficient parse(const std::string& text);

  double operator()(double x) const {
    switch (family) {
      case Family::Constant: return c0;
      case Family::Linear: return c0 * x;
      case Family::Affine: return c0 + c1 * x;
    }
    return 0.0;
  }
  bool is_zero() const { return c0 == 0.0 && (family != Family::Affine || c1 == 0.0); }
  std::string describe() const;
};

/// dX = a(X) dt + b(X) dW on R^m with X_0 = u0.
///
/// Library users may install arbitrary coefficient functions; the built-in
/// families are recorded in `families` so the scalar case runs without
/// indirection. Rate guarantees of the Euler algorithms assume the usual
/// smoothness and non-degeneracy conditions; they are not checked here.
struct DiffusionSpec {
  using DriftFn =
      std::function<void(const Eigen::Ref<const Eigen::VectorXd>&, Eigen::Ref<Eigen::VectorXd>)>;
  using DiffusionFn =
      std::function<void(const Eigen::Ref<const Eigen::VectorXd>&, Eigen::Ref<Eigen::MatrixXd>)>;

  Index dim = 1;
  DriftFn drift;
  DiffusionFn diffusion;
  Eigen::VectorXd u0;
  std::optional<std::pair<Coefficient, Coefficient>> families;

  static DiffusionSpec from_families(const Coefficient& drift, const Coefficient& diffusion,
                                     Eigen::VectorXd u0);
  /// Geometric Brownian motion a(x) = mu x, b(x) = sigma x in one dimension.
  static DiffusionSpec gbm(double mu, double sigma, double u0);
  std::string describe() const;
};

struct UniformCube {
  Index dim = 1;
};
struct StdNormal {
  Index dim = 1;
};
/// Brownian motion as the KL series truncated after k_terms terms.
struct BrownianKL {
  Index k_terms = 200;
  GridPtr grid = default_grid();
};
/// Euler paths with k_steps breakpoints, interpolated onto the grid.
struct Diffusion {
  DiffusionSpec spec;
  Index k_steps = 2;
  GridPtr grid = default_grid();
};

using MeasureSpec = std::variant<UniformCube, StdNormal, BrownianKL, Diffusion>;

/// Brownian motion sampled exactly at the points of a uniform grid: the
/// Euler scheme of dX = dW with one breakpoint per grid point.
MeasureSpec brownian_on_grid(const GridPtr& grid);

void validate(const MeasureSpec& measure);
Space space_of(const MeasureSpec& measure);
/// Dimension k of the subspace a sample lives in: d, k_terms, or k_steps*m.
Index subspace_dim(const MeasureSpec& measure);
/// Config-style description, e.g. "kind=uniform_cube d=2".
std::string describe(const MeasureSpec& measure);
/// Short identifier stored in codebook files, e.g. "uniform_cube:2".
std::string measure_tag(const MeasureSpec& measure);

/// Samples with indices first .. first+out.cols()-1 into the columns of
/// `out`. Sample i is drawn from RandomStream(seed, i) only, so any split of
/// the index range gives the same values. Returns the number of variates
/// drawn.
std::uint64_t sample_into(const MeasureSpec& measure, const SeedSpec& seed, Index first,
                          Eigen::Ref<Eigen::MatrixXd> out);

struct SampleSet {
  Space space;
  Eigen::MatrixXd data;  // flat_size x count
  std::uint64_t rng_calls = 0;

  Index count() const { return data.cols(); }
};

SampleSet sample(const MeasureSpec& measure, const SeedSpec& seed, Index count);

/// W^(k)(t) = sum_{l<=k} sqrt(lambda_l) Z_l e_l(t) on the grid (sample 0 of
/// the stream).
Path sample_brownian_kl(Index k_terms, const GridPtr& grid, const SeedSpec& seed);

/// Euler scheme with step 1/(k-1) and standard normal increments,
/// interpolated piecewise linearly at the grid points (sample 0 of the
/// stream). Throws NumericError with the step index on non-finite values.
Path euler_strong_path(const DiffusionSpec& spec, Index k, const SeedSpec& seed,
                       const GridPtr& grid = default_grid());

/// Monte Carlo mean of fn over samples 0..count-1 of the measure, in chunks.
/// fn receives (sample, index). Deterministic for any worker count.
Estimate integrate_mc(const MeasureSpec& measure, const SeedSpec& seed, Index count,
                      const std::function<double(const Eigen::Ref<const Eigen::VectorXd>&, Index)>& fn,
                      std::uint64_t* rng_calls = nullptr);

/// Plain Monte Carlo estimate of the integral of f, used as ground truth.
/// Failures of f are rethrown as NumericError carrying the sample index.
Estimate reference_value(const Functional& f, const MeasureSpec& measure, Index budget,
                         const SeedSpec& seed);

}  // namespace quantquad
