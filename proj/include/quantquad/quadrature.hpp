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
#include <string>

#include "quantquad/functional.hpp"
#include "quantquad/measures.hpp"
#include "quantquad/quantize.hpp"
#include "quantquad/subspace.hpp"

namespace quantquad {

/// Oracle cost is k times the number of functional evaluations, k being the
/// dimension of the subspace the evaluation points live in.
struct CostLedger {
  Index oracle_calls = 0;
  Index subspace_dim = 0;
  Index oracle_cost = 0;
  std::uint64_t rng_calls = 0;
  /// Loop-level operation count, a per-sample constant. A proxy only.
  std::uint64_t arithmetic_proxy = 0;
};

struct QuadratureResult {
  double estimate = 0.0;
  double std_error = 0.0;  // 0 for deterministic formulas
  Index cardinality = 0;
  Index subspace_dim = 0;
  CostLedger cost;
};

/// phi(eps) ~ eps^-alpha (ln 1/eps)^beta.
struct SmallBallProfile {
  double alpha = 2.0;
  double beta = 0.0;
};

struct Schedule {
  Index n = 0;  // replications
  Index k = 0;  // subspace dimension / breakpoints
};

/// sum_i w_i f(x_i). Needs codebook weights.
QuadratureResult voronoi_quadrature(const Codebook& cb, const Functional& f);

/// Mean of f over n independent draws, n >= 2.
QuadratureResult classical_mc(const MeasureSpec& measure, const Functional& f, Index n,
                              const SeedSpec& seed);

/// Quantization control variate: sum_i w_i f(x_i) + mean of f - f(x_nearest)
/// over n fresh draws. Cardinality counts the n draws and the codebook
/// evaluations.
QuadratureResult vr_mc(const Codebook& cb, const MeasureSpec& measure, const Functional& f, Index n,
                       const SeedSpec& seed);

/// Mean of f over n Euler paths with k breakpoints.
QuadratureResult euler_mc(const DiffusionSpec& spec, const Functional& f, Index k, Index n,
                          const SeedSpec& seed, const GridPtr& grid = default_grid());

/// n = floor(sqrt(N / ln N)), k = floor(sqrt(N ln N)).
Schedule t8_schedule(double budget);
/// n = floor(N^(2/(2+a)) (ln N)^(-2(a+b)/(2+a))),
/// k = floor(N^(a/(2+a)) (ln N)^(2(a+b)/(2+a))).
Schedule galg_schedule(double budget, const SmallBallProfile& profile);

/// Classical Monte Carlo over n draws of the process restricted to a KL
/// subspace: sum_l sqrt(lambda_l) Z_l b_l with b_l the stored basis.
QuadratureResult gaussian_subspace_mc(const Subspace& sub, const Functional& f, Index n,
                                      const SeedSpec& seed);

CostLedger cost_of(const QuadratureResult& result);
/// "oracle_calls=.. k=.. oracle_cost=.. rng_calls=.. arithmetic_proxy=..".
std::string describe(const CostLedger& cost);

}  // namespace quantquad
