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

#include "quantquad/functional.hpp"

#include <sstream>

namespace quantquad {

NormKind natural_norm(const Space& space) {
  return space.is_path() ? NormKind::Sup : NormKind::Euclidean;
}

void require_oracle_dim(const Functional& f, Index k) {
  if (f.oracle_dim && k > *f.oracle_dim) {
    throw ConfigError("functional '" + f.name + "' only accepts points of a " +
                      std::to_string(*f.oracle_dim) + "-dimensional subspace, algorithm uses " +
                      std::to_string(k));
  }
}

double evaluate(const Functional& f, const Eigen::Ref<const Eigen::VectorXd>& x, Index index) {
  double v = 0.0;
  try {
    v = f(x);
  } catch (const std::exception& e) {
    throw NumericError("functional '" + f.name + "' failed at sample " + std::to_string(index) +
                           ": " + e.what(),
                       static_cast<std::size_t>(index));
  }
  if (!std::isfinite(v)) {
    throw NumericError("functional '" + f.name + "' returned a non-finite value at sample " +
                           std::to_string(index),
                       static_cast<std::size_t>(index));
  }
  return v;
}

namespace functionals {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Index path_offset(const Space& space, double t, Index channel) {
  if (!space.is_path()) throw ConfigError("coord_at(t) needs a path space; use coord(i) for points");
  if (channel < 0 || channel >= space.dim) throw ConfigError("coord_at: channel out of range");
  const auto j = space.grid->index_of(t);
  if (!j) throw ConfigError("coord_at: t=" + fmt(t) + " is not a grid point");
  return channel * space.grid->size() + *j;
}

}  // namespace

Functional coord_at(const Space& space, double t, Index channel) {
  const Index off = path_offset(space, t, channel);
  return {"coord_at(" + fmt(t) + ")",
          [off](const Eigen::Ref<const Eigen::VectorXd>& x) { return x[off]; }, 1.0,
          NormKind::Sup, std::nullopt};
}

Functional abs_coord_at(const Space& space, double t, Index channel) {
  const Index off = path_offset(space, t, channel);
  return {"abs_coord_at(" + fmt(t) + ")",
          [off](const Eigen::Ref<const Eigen::VectorXd>& x) { return std::abs(x[off]); }, 1.0,
          NormKind::Sup, std::nullopt};
}

Functional coordinate(const Space& space, Index i) {
  if (space.is_path()) throw ConfigError("coord(i) needs a finite-dimensional space");
  if (i < 0 || i >= space.dim) throw ConfigError("coord: index out of range");
  return {"coord(" + std::to_string(i) + ")",
          [i](const Eigen::Ref<const Eigen::VectorXd>& x) { return x[i]; }, 1.0,
          NormKind::Euclidean, std::nullopt};
}

Functional sup_norm(const Space&) {
  return {"sup_norm",
          [](const Eigen::Ref<const Eigen::VectorXd>& x) { return x.cwiseAbs().maxCoeff(); }, 1.0,
          NormKind::Sup, std::nullopt};
}

Functional sup_value(const Space&) {
  return {"sup_value",
          [](const Eigen::Ref<const Eigen::VectorXd>& x) { return x.maxCoeff(); }, 1.0,
          NormKind::Sup, std::nullopt};
}

Functional l1_integral(const Space& space) {
  if (!space.is_path()) throw ConfigError("l1_integral needs a path space");
  return {"l1_integral",
          [space](const Eigen::Ref<const Eigen::VectorXd>& x) {
            return norm(space, x, NormKind::L1);
          },
          1.0, NormKind::L1, std::nullopt};
}

Functional abs_deviation(const Space& space, double c) {
  const double inv = 1.0 / static_cast<double>(space.flat_size());
  return {"abs_dev(" + fmt(c) + ")",
          [c, inv](const Eigen::Ref<const Eigen::VectorXd>& x) {
            return (x.array() - c).abs().sum() * inv;
          },
          1.0, natural_norm(space), std::nullopt};
}

Functional constant(double c) {
  return {"constant(" + fmt(c) + ")",
          [c](const Eigen::Ref<const Eigen::VectorXd>&) { return c; }, 0.0, NormKind::Sup,
          std::nullopt};
}

}  // namespace functionals
}  // namespace quantquad
