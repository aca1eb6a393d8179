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
#include "quantquad/quantize.hpp"
#include "quantquad/subspace.hpp"

namespace quantquad {

struct FoolingFamily {
  std::vector<Functional> functionals;
  std::string kind;
  std::string metadata;

  Index size() const { return static_cast<Index>(functionals.size()); }
};

/// f_i(x) = 1/2 max(0, min_{j != i} ||x - x_j|| - ||x - x_i||), one per
/// codebook point. Each is 1-Lipschitz and f_i f_j = 0 for i != j.
FoolingFamily fooling_family(const Codebook& cb, std::optional<NormKind> norm = std::nullopt);

/// sum_i signs[i] f_i, with signs in {-1, +1}.
Functional signed_combination(const FoolingFamily& family, const std::vector<int>& signs);

/// Largest number of family members positive at one sample column.
Index max_support_overlap(const FoolingFamily& family, const Eigen::Ref<const Eigen::MatrixXd>& samples);

struct GapReport {
  double lhs = 0.0;  // S(f_m)
  double lhs_se = 0.0;
  double rhs = 0.0;  // (q(x_1..x_{m-1}) - q(x_1..x_m)) / 2, order 1
  double rhs_se = 0.0;
  double difference = 0.0;
  double combined_se = 0.0;
  Index sample_count = 0;
  bool passed = false;
};

/// Both sides of S(f_m) = (q(x_1..x_{m-1}) - q(x_1..x_m)) / 2 on one shared
/// pool of M samples. Passes iff |difference| <= 3 combined_se (plus a
/// rounding floor of 1e-12 relative).
GapReport gap_identity_check(const Codebook& cb, const MeasureSpec& measure, Index M,
                             const SeedSpec& seed);

struct IncrementFamilySpec {
  Index ell = 1;
  double eps = 1.0;
  double theta = 0.0;
  std::vector<int> alpha;  // entries 0 or 1; empty means all zeros
};

/// f(x) = 1/2 min_i max(0, sigma_i (x(s_i) - x(s_{i-1})) - theta), with
/// s_i = i eps / ell on the grid and sigma_i = +1 for alpha_i = 0, -1 for 1.
Functional increment_functional(const IncrementFamilySpec& spec, const GridPtr& grid = default_grid());

struct EventReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double analytic = 0.0;   // p^ell, p = 1 - Phi(1/ell)
  double cap = 0.0;        // 2^-ell
  double threshold = 0.0;  // eps^(1/2) / ell^(3/2)
  Index sample_count = 0;
};

/// Probability that every increment sigma_i (W(s_i) - W(s_{i-1})) is at least
/// the threshold, s_i = i eps / ell, for Brownian motion sampled exactly on
/// the grid. Inequalities are weak.
EventReport event_probability(Index ell, double eps, Index M, const SeedSpec& seed,
                              const GridPtr& grid = default_grid(), std::vector<int> alpha = {});

/// 1/4 sqrt(n) min_i (S(f_i) - 3 se_i), clamped at 0. Needs m >= 4n means.
double bakhvalov_lower_bound(Index n, const std::vector<Estimate>& family_means);

/// f_0(x) = L2 distance from x to the subspace. Residuals at the level of
/// rounding (1e-12 max(1, ||x||_L2)) are returned as exactly 0.
Functional subspace_blind_functional(const Subspace& sub);

struct LipschitzReport {
  double max_ratio = 0.0;
  double claim = 0.0;
  Index pairs_checked = 0;
  Index pairs_skipped = 0;  // coincident pairs
  bool flagged = false;
};

/// Max of |f(x) - f(y)| / ||x - y|| over `pairs` independent pairs plus as
/// many pairs y = x + small random bump; flags ratios above
/// lip_claim (1 + 1e-9). The norm defaults to f.lip_norm.
LipschitzReport lipschitz_check(const Functional& f, const MeasureSpec& measure, Index pairs,
                                const SeedSpec& seed, std::optional<NormKind> norm = std::nullopt);

}  // namespace quantquad
