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

#include <span>
#include <string>

#include "quantquad/paths.hpp"

namespace quantquad {

/// KL eigenvalue of Brownian motion on [0,1]: ((l - 1/2) pi)^-2, l >= 1.
double kl_eigenvalue(Index l);
/// KL eigenfunction sqrt(2) sin((l - 1/2) pi t), l >= 1.
double kl_eigenfunction(Index l, double t);

/// Finite-dimensional linear subspace of a path space. The stored basis is
/// orthonormal in the trapezoid L2 inner product of the grid.
class Subspace {
 public:
  enum class Kind { PiecewiseLinear, KarhunenLoeve };

  Subspace(Space space, Eigen::MatrixXd raw_basis, Kind kind, Eigen::VectorXd breakpoints = {});

  const Space& space() const { return space_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  Index dim() const { return basis_.cols(); }
  Kind kind() const { return kind_; }
  /// Breakpoints (piecewise-linear) or empty (KL).
  const Eigen::VectorXd& breakpoints() const { return breakpoints_; }
  std::string kind_name() const;

  /// Gram matrix of the stored basis in the grid L2 inner product.
  Eigen::MatrixXd gram() const;
  /// Coefficients of the L2-orthogonal projection of x.
  Eigen::VectorXd coefficients(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  Space space_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd weights_;   // trapezoid weights repeated per channel
  Kind kind_;
  Eigen::VectorXd breakpoints_;
};

/// Span of the hat functions with the given breakpoints, per channel.
/// Breakpoints must include 0 and 1, increase strictly and sit on grid points.
Subspace make_pl_subspace(const GridPtr& grid, std::span<const double> breakpoints,
                          Index channels = 1);
/// Breakpoints l/(k-1), l = 0..k-1.
Subspace make_pl_subspace_uniform(const GridPtr& grid, Index k, Index channels = 1);
/// Span of the first k Brownian KL eigenfunctions, re-orthonormalised on the grid.
Subspace make_kl_subspace(Index k, const GridPtr& grid = default_grid());

struct Projection {
  Eigen::VectorXd projection;
  double residual_sup = 0.0;
  double residual_l1 = 0.0;
  /// Equal to the L2 distance from x to the subspace. The Sup and L1
  /// residuals of the L2 projection are upper bounds for the respective
  /// distances.
  double residual_l2 = 0.0;

  double residual(NormKind kind) const;
};

Projection project(const Eigen::Ref<const Eigen::VectorXd>& x, const Subspace& sub);
Projection project(const Path& x, const Subspace& sub);

}  // namespace quantquad
