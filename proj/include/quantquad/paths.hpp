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

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "quantquad/error.hpp"

namespace quantquad {

using Index = Eigen::Index;

/// Strictly increasing time points t_0 = 0 < ... < t_{G-1} = 1, together with
/// the trapezoid weights used for the L1 and L2 path norms.
class Grid {
 public:
  explicit Grid(Eigen::VectorXd points);

  static std::shared_ptr<const Grid> uniform(Index size);

  Index size() const { return points_.size(); }
  const Eigen::VectorXd& points() const { return points_; }
  double operator[](Index j) const { return points_[j]; }
  const Eigen::VectorXd& weights() const { return weights_; }
  bool is_uniform() const { return uniform_; }

  /// Index of the grid point within `tol` of t, if any.
  std::optional<Index> index_of(double t, double tol = 1e-12) const;

  bool operator==(const Grid& other) const { return points_ == other.points_; }

 private:
  Eigen::VectorXd points_;
  Eigen::VectorXd weights_;
  bool uniform_ = false;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Uniform grid with 257 points, shared.
GridPtr default_grid();

enum class NormKind { Sup, L1, L2, Euclidean };

std::string to_string(NormKind kind);
NormKind parse_norm_kind(const std::string& name);

/// Ambient space of a sample: either R^d, or R^m-valued paths on a grid.
/// Samples of either kind are stored flat; a path is the column-major
/// flattening of its G x m value matrix.
struct Space {
  enum class Kind { Euclidean, Path };

  Kind kind = Kind::Euclidean;
  Index dim = 1;       // d for Euclidean spaces, m (channels) for path spaces
  GridPtr grid;        // set iff kind == Path

  static Space euclidean(Index d);
  static Space paths(GridPtr grid, Index channels = 1);

  bool is_path() const { return kind == Kind::Path; }
  Index flat_size() const { return is_path() ? grid->size() * dim : dim; }
  bool operator==(const Space& other) const;
  std::string describe() const;
};

/// Throws ConfigError unless `x` has the flat size of `space`.
void require_shape(const Space& space, Index flat_size, const char* what);
void require_same_space(const Space& a, const Space& b, const char* what);
/// Throws ConfigError if `kind` is not defined on `space`.
void require_norm_valid(const Space& space, NormKind kind);

/// Norm of a flat sample. Euclidean and Sup are defined on R^d; Sup, L1 and
/// L2 on path spaces, with L1 and L2 integrated by the trapezoid rule.
template <typename Derived>
double norm(const Space& space, const Eigen::MatrixBase<Derived>& x, NormKind kind) {
  require_norm_valid(space, kind);
  switch (kind) {
    case NormKind::Euclidean:
      return x.norm();
    case NormKind::Sup:
      return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
    case NormKind::L1:
    case NormKind::L2: {
      const Eigen::VectorXd& w = space.grid->weights();
      const Index g = w.size();
      double acc = 0.0;
      for (Index c = 0; c < space.dim; ++c) {
        const auto seg = x.segment(c * g, g);
        acc += kind == NormKind::L1 ? w.dot(seg.cwiseAbs()) : w.dot(seg.cwiseAbs2());
      }
      return kind == NormKind::L1 ? acc : std::sqrt(acc);
    }
  }
  return 0.0;
}

/// norm(x - y), with a shape check.
template <typename DerivedA, typename DerivedB>
double distance(const Space& space, const Eigen::MatrixBase<DerivedA>& x,
                const Eigen::MatrixBase<DerivedB>& y, NormKind kind) {
  if (x.size() != y.size() || x.size() != space.flat_size()) {
    throw ConfigError("distance: samples do not live on the same grid/dimension");
  }
  return norm(space, x - y, kind);
}

/// An R^m-valued path sampled on a grid, values stored as a G x m matrix.
struct Path {
  GridPtr grid;
  Eigen::MatrixXd values;

  Path(GridPtr g, Eigen::MatrixXd v);
  /// Flat sample view (column-major G x m).
  Eigen::Map<const Eigen::VectorXd> flat() const {
    return {values.data(), values.size()};
  }
  Space space() const { return Space::paths(grid, values.cols()); }
  Index channels() const { return values.cols(); }
  /// Path from a flat sample of `space`.
  static Path from_flat(const Space& space, const Eigen::Ref<const Eigen::VectorXd>& flat);
};

/// Path t -> fn(t) on a grid, single channel.
template <typename Fn>
Path make_path(const GridPtr& grid, Fn&& fn) {
  Eigen::MatrixXd v(grid->size(), 1);
  for (Index j = 0; j < grid->size(); ++j) v(j, 0) = fn((*grid)[j]);
  return Path(grid, std::move(v));
}

}  // namespace quantquad
