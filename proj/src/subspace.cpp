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

#include "quantquad/subspace.hpp"

#include <Eigen/QR>

#include <numbers>

namespace quantquad {

double kl_eigenvalue(Index l) {
  const double f = (static_cast<double>(l) - 0.5) * std::numbers::pi;
  return 1.0 / (f * f);
}

double kl_eigenfunction(Index l, double t) {
  return std::numbers::sqrt2 * std::sin((static_cast<double>(l) - 0.5) * std::numbers::pi * t);
}

Subspace::Subspace(Space space, Eigen::MatrixXd raw_basis, Kind kind, Eigen::VectorXd breakpoints)
    : space_(std::move(space)), kind_(kind), breakpoints_(std::move(breakpoints)) {
  if (!space_.is_path()) throw ConfigError("subspaces live in path spaces");
  require_shape(space_, raw_basis.rows(), "subspace basis");
  const Index k = raw_basis.cols();
  if (k < 1) throw ConfigError("subspace dimension must be >= 1");
  if (k > raw_basis.rows()) throw ConfigError("subspace dimension exceeds the grid size");

  weights_ = space_.grid->weights().replicate(space_.dim, 1);
  const Eigen::VectorXd sqrt_w = weights_.cwiseSqrt();

  // QR in the weighted space: sqrt(W) B = Q R, basis = W^{-1/2} Q.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(sqrt_w.asDiagonal() * raw_basis);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const double scale = r.diagonal().cwiseAbs().maxCoeff();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(raw_basis.rows(), k);
  for (Index j = 0; j < k; ++j) {
    if (std::abs(r(j, j)) <= 1e-10 * scale) {
      throw ConfigError("subspace basis is linearly dependent on this grid");
    }
    if (r(j, j) < 0) q.col(j) *= -1.0;  // keep orientation of the raw basis
  }
  basis_ = sqrt_w.cwiseInverse().asDiagonal() * q;
}

std::string Subspace::kind_name() const {
  return kind_ == Kind::PiecewiseLinear ? "piecewise_linear" : "kl";
}

Eigen::MatrixXd Subspace::gram() const {
  return basis_.transpose() * weights_.asDiagonal() * basis_;
}

Eigen::VectorXd Subspace::coefficients(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require_shape(space_, x.size(), "project");
  return basis_.transpose() * weights_.cwiseProduct(x);
}

Subspace make_pl_subspace(const GridPtr& grid, std::span<const double> breakpoints,
                          Index channels) {
  const auto nb = static_cast<Index>(breakpoints.size());
  if (nb < 2 || breakpoints.front() != 0.0 || breakpoints.back() != 1.0) {
    throw ConfigError("breakpoints must include 0 and 1");
  }
  std::vector<Index> nodes;
  for (Index i = 0; i < nb; ++i) {
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
      throw ConfigError("breakpoints must be strictly increasing");
    }
    const auto j = grid->index_of(breakpoints[i]);
    if (!j) throw ConfigError("breakpoint " + std::to_string(breakpoints[i]) + " is not a grid point");
    nodes.push_back(*j);
  }
  const Index g = grid->size();
  const Eigen::VectorXd& t = grid->points();
  Eigen::MatrixXd hats = Eigen::MatrixXd::Zero(g * channels, nb * channels);
  for (Index i = 0; i < nb; ++i) {
    for (Index j = 0; j < g; ++j) {
      double v = 0.0;
      if (j == nodes[i]) {
        v = 1.0;
      } else if (i > 0 && j > nodes[i - 1] && j < nodes[i]) {
        v = (t[j] - t[nodes[i - 1]]) / (t[nodes[i]] - t[nodes[i - 1]]);
      } else if (i + 1 < nb && j > nodes[i] && j < nodes[i + 1]) {
        v = (t[nodes[i + 1]] - t[j]) / (t[nodes[i + 1]] - t[nodes[i]]);
      }
      for (Index c = 0; c < channels; ++c) hats(c * g + j, c * nb + i) = v;
    }
  }
  Eigen::VectorXd bp = Eigen::Map<const Eigen::VectorXd>(breakpoints.data(), nb);
  return Subspace(Space::paths(grid, channels), std::move(hats), Subspace::Kind::PiecewiseLinear,
                  std::move(bp));
}

Subspace make_pl_subspace_uniform(const GridPtr& grid, Index k, Index channels) {
  if (k < 2) throw ConfigError("piecewise-linear subspace needs k >= 2 breakpoints");
  std::vector<double> bp(static_cast<std::size_t>(k));
  for (Index l = 0; l < k; ++l) bp[l] = static_cast<double>(l) / static_cast<double>(k - 1);
  return make_pl_subspace(grid, bp, channels);
}

Subspace make_kl_subspace(Index k, const GridPtr& grid) {
  if (k < 1) throw ConfigError("KL subspace needs k >= 1");
  const Index g = grid->size();
  Eigen::MatrixXd e(g, k);
  for (Index l = 1; l <= k; ++l) {
    for (Index j = 0; j < g; ++j) e(j, l - 1) = kl_eigenfunction(l, (*grid)[j]);
  }
  return Subspace(Space::paths(grid, 1), std::move(e), Subspace::Kind::KarhunenLoeve);
}

double Projection::residual(NormKind kind) const {
  switch (kind) {
    case NormKind::Sup: return residual_sup;
    case NormKind::L1: return residual_l1;
    case NormKind::L2: return residual_l2;
    case NormKind::Euclidean: break;
  }
  throw ConfigError("euclidean residual is not defined for paths");
}

Projection project(const Eigen::Ref<const Eigen::VectorXd>& x, const Subspace& sub) {
  Projection p;
  p.projection = sub.basis() * sub.coefficients(x);
  const Eigen::VectorXd r = x - p.projection;
  p.residual_sup = norm(sub.space(), r, NormKind::Sup);
  p.residual_l1 = norm(sub.space(), r, NormKind::L1);
  p.residual_l2 = norm(sub.space(), r, NormKind::L2);
  return p;
}

Projection project(const Path& x, const Subspace& sub) {
  require_same_space(x.space(), sub.space(), "project");
  return project(x.flat(), sub);
}

}  // namespace quantquad
