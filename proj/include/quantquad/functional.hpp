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

#include <functional>
#include <optional>
#include <string>

#include "quantquad/paths.hpp"

namespace quantquad {

/// Evaluation oracle for an integrand f on a sample space.
///
/// `lip_claim` is the Lipschitz constant the functional claims with respect
/// to `lip_norm`; it is not enforced, only checked statistically by
/// lipschitz_check. When `oracle_dim` is set, quadrature algorithms refuse to
/// evaluate the functional at points drawn from a subspace of larger
/// dimension (the oracle only accepts inputs of that dimension).
struct Functional {
  using Fn = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

  std::string name;
  Fn eval;
  double lip_claim = 1.0;
  NormKind lip_norm = NormKind::Sup;
  std::optional<Index> oracle_dim;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const { return eval(x); }
};

/// f(x), rethrowing failures and non-finite values as NumericError carrying
/// the sample index.
double evaluate(const Functional& f, const Eigen::Ref<const Eigen::VectorXd>& x, Index index);

/// Euclidean for R^d, Sup for path spaces.
NormKind natural_norm(const Space& space);

/// Throws ConfigError if f declares an oracle dimension smaller than `k`.
void require_oracle_dim(const Functional& f, Index k);

namespace functionals {

/// x(t) of channel `channel`; t must be a grid point.
Functional coord_at(const Space& space, double t, Index channel = 0);
/// |x(t)|, t a grid point.
Functional abs_coord_at(const Space& space, double t, Index channel = 0);
/// i-th coordinate of a point (0-based).
Functional coordinate(const Space& space, Index i);
/// max_t |x(t)| (path) or max_i |x_i| (point).
Functional sup_norm(const Space& space);
/// max_t x(t), without absolute value.
Functional sup_value(const Space& space);
/// Trapezoid integral of |x(t)|, i.e. the L1 norm of a path.
Functional l1_integral(const Space& space);
/// Mean over coordinates of |x_i - c|; 1-Lipschitz in Sup and Euclidean.
Functional abs_deviation(const Space& space, double c);
Functional constant(double c);

}  // namespace functionals
}  // namespace quantquad
