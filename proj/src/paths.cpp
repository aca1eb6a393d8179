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

#include "quantquad/paths.hpp"

#include <algorithm>

namespace quantquad {

Grid::Grid(Eigen::VectorXd points) : points_(std::move(points)) {
  const Index g = points_.size();
  if (g < 2) throw ConfigError("grid needs at least 2 points");
  if (points_[0] != 0.0 || points_[g - 1] != 1.0) {
    throw ConfigError("grid must start at 0 and end at 1 exactly");
  }
  for (Index j = 1; j < g; ++j) {
    if (!(points_[j] > points_[j - 1])) throw ConfigError("grid must be strictly increasing");
  }
  weights_ = Eigen::VectorXd::Zero(g);
  for (Index j = 0; j + 1 < g; ++j) {
    const double h = points_[j + 1] - points_[j];
    weights_[j] += 0.5 * h;
    weights_[j + 1] += 0.5 * h;
  }
  uniform_ = true;
  for (Index j = 0; j < g; ++j) {
    if (points_[j] != static_cast<double>(j) / static_cast<double>(g - 1)) {
      uniform_ = false;
      break;
    }
  }
}

std::shared_ptr<const Grid> Grid::uniform(Index size) {
  if (size < 2) throw ConfigError("grid needs at least 2 points");
  Eigen::VectorXd t(size);
  for (Index j = 0; j < size; ++j) t[j] = static_cast<double>(j) / static_cast<double>(size - 1);
  return std::make_shared<const Grid>(std::move(t));
}

std::optional<Index> Grid::index_of(double t, double tol) const {
  const double* begin = points_.data();
  const double* end = begin + points_.size();
  const double* it = std::lower_bound(begin, end, t);
  std::optional<Index> best;
  double best_gap = tol;
  for (const double* p : {it - 1, it}) {
    if (p < begin || p >= end) continue;
    const double gap = std::abs(*p - t);
    if (gap <= best_gap) {
      best_gap = gap;
      best = static_cast<Index>(p - begin);
    }
  }
  return best;
}

GridPtr default_grid() {
  static const GridPtr grid = Grid::uniform(257);
  return grid;
}

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::Sup: return "sup";
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::Euclidean: return "euclidean";
  }
  return "?";
}

NormKind parse_norm_kind(const std::string& name) {
  if (name == "sup") return NormKind::Sup;
  if (name == "l1") return NormKind::L1;
  if (name == "l2") return NormKind::L2;
  if (name == "euclidean") return NormKind::Euclidean;
  throw ConfigError("unknown norm '" + name + "' (expected sup, l1, l2 or euclidean)");
}

Space Space::euclidean(Index d) {
  if (d < 1) throw ConfigError("dimension must be >= 1");
  return Space{Kind::Euclidean, d, nullptr};
}

Space Space::paths(GridPtr grid, Index channels) {
  if (!grid) throw ConfigError("path space needs a grid");
  if (channels < 1) throw ConfigError("path dimension m must be >= 1");
  return Space{Kind::Path, channels, std::move(grid)};
}

bool Space::operator==(const Space& other) const {
  if (kind != other.kind || dim != other.dim) return false;
  if (!is_path()) return true;
  return grid == other.grid || *grid == *other.grid;
}

std::string Space::describe() const {
  if (!is_path()) return "dim=" + std::to_string(dim);
  std::string s = "grid=" + std::to_string(grid->size());
  if (dim > 1) s += "x" + std::to_string(dim);
  return s;
}

void require_shape(const Space& space, Index flat_size, const char* what) {
  if (flat_size != space.flat_size()) {
    throw ConfigError(std::string(what) + ": sample has " + std::to_string(flat_size) +
                      " entries, space " + space.describe() + " needs " +
                      std::to_string(space.flat_size()));
  }
}

void require_same_space(const Space& a, const Space& b, const char* what) {
  if (!(a == b)) {
    throw ConfigError(std::string(what) + ": space mismatch (" + a.describe() + " vs " +
                      b.describe() + ")");
  }
}

void require_norm_valid(const Space& space, NormKind kind) {
  const bool path = space.is_path();
  if (path && kind == NormKind::Euclidean) {
    throw ConfigError("euclidean norm is only defined for finite-dimensional points");
  }
  if (!path && (kind == NormKind::L1 || kind == NormKind::L2)) {
    throw ConfigError(to_string(kind) + " norm is only defined for paths");
  }
}

Path::Path(GridPtr g, Eigen::MatrixXd v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw ConfigError("path needs a grid");
  if (values.rows() != grid->size() || values.cols() < 1) {
    throw ConfigError("path values must be G x m with m >= 1");
  }
  if (!values.allFinite()) throw NumericError("path values must be finite", 0);
}

Path Path::from_flat(const Space& space, const Eigen::Ref<const Eigen::VectorXd>& flat) {
  if (!space.is_path()) throw ConfigError("from_flat: not a path space");
  require_shape(space, flat.size(), "from_flat");
  return Path(space.grid, Eigen::Map<const Eigen::MatrixXd>(flat.data(), space.grid->size(), space.dim));
}

}  // namespace quantquad
