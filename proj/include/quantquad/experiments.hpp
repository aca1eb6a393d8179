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
#include "quantquad/quadrature.hpp"
#include "quantquad/subspace.hpp"

namespace quantquad {

struct RatePoint {
  double size = 1.0;  // n, k or N
  double error = 0.0;
  double std_error = 0.0;
};

enum class RateTransform {
  LogLog,       // ln error against ln size
  LogLogInLog,  // ln error against ln ln size
};

std::string to_string(RateTransform t);
RateTransform parse_rate_transform(const std::string& name);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_se = 0.0;
  RateTransform transform = RateTransform::LogLog;
  Index points_used = 0;
  std::vector<std::string> warnings;
};

/// Least squares on the transformed coordinates. Points with zero error are
/// dropped with a warning; at least four must remain.
RateFit rate_fit(const std::vector<RatePoint>& points, RateTransform transform);

/// (E dist^p(X, sub))^(1/p) with the L2-projection residual measured in
/// `norm`; size = sub.dim(). An upper estimate of the average width.
RatePoint width_estimate(const MeasureSpec& measure, const Subspace& sub, double p, Index M,
                         const SeedSpec& seed, NormKind norm = NormKind::L2);

/// (sum_{l > k} lambda_l)^(1/2), the L2 error of the k-term KL truncation.
double kl_tail_width(Index k);

/// One rate experiment. Algorithms:
///   mc        classical_mc with n = size
///   vrmc      vr_mc with an n-point codebook (lattice or lloyd) and n draws
///   euler     euler_mc with (n, k) = t8_schedule(size); measure is a diffusion
///   gauss-sub gaussian_subspace_mc with (n, k) = galg_schedule(size, profile)
///   pq        distortion of product_quantizer_bm(size), no replications
///   width     width_estimate on KL(size), no replications
struct RateConfig {
  std::string name = "rates";
  std::string algorithm = "mc";
  MeasureSpec measure = UniformCube{1};
  std::string measure_text = "uniform_cube:1";
  std::optional<Functional> functional;
  std::string functional_text;
  std::vector<double> ladder;
  Index replications = 200;
  std::string codebook = "lattice";
  Index lloyd_pool = 100000;
  std::optional<double> exact_reference;
  Index reference_budget = 0;  // 0: max(10^4, 20 x largest per-replication n)
  Index reference_k = 0;       // euler reference breakpoints; 0: 2 k_max - 1
  SmallBallProfile profile;
  Index distortion_samples = 4000;
  double order = 2.0;  // width p, distortion r
  NormKind norm = NormKind::L2;
  RateTransform transform = RateTransform::LogLog;
  std::optional<double> slope_lo;
  std::optional<double> slope_hi;
  bool require_decreasing = false;
  SeedSpec seed;
};

struct RateRow {
  RatePoint point;
  Index n = 0;
  Index k = 0;
};

struct RateReport {
  std::vector<RateRow> rows;
  RateFit fit;
  double reference = 0.0;
  double reference_se = 0.0;
  bool slope_ok = true;
  bool decreasing_ok = true;
  bool passed = true;
  /// Seeds and reference details, one line each.
  std::vector<std::string> log;
};

RateReport run_rate_experiment(const RateConfig& config);

/// CSV table: size,rmse,stderr,n,k,slope,pass.
std::string rate_table_csv(const RateReport& report);
/// Plot data: size,error,stderr,fit.
std::string rate_plot_csv(const RateReport& report);

}  // namespace quantquad
