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

#include "quantquad/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "quantquad/parallel.hpp"

namespace quantquad {
namespace {

constexpr Index kChunk = 1024;

struct SharedCodebook {
  Space space;
  Eigen::MatrixXd points;
  NormKind norm;
};

double fooling_value(const SharedCodebook& cb, Index i, const Eigen::Ref<const Eigen::VectorXd>& x) {
  double own = 0.0, other = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < cb.points.cols(); ++j) {
    const double d = norm(cb.space, x - cb.points.col(j), cb.norm);
    if (j == i) {
      own = d;
    } else {
      other = std::min(other, d);
    }
  }
  return 0.5 * std::max(0.0, other - own);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

FoolingFamily fooling_family(const Codebook& cb, std::optional<NormKind> norm_kind) {
  cb.validate();
  if (cb.size() < 2) throw ConfigError("fooling_family: needs m >= 2 codebook points");
  cb.require_distinct();
  const NormKind kind = norm_kind.value_or(cb.norm);
  require_norm_valid(cb.space, kind);
  auto shared = std::make_shared<const SharedCodebook>(SharedCodebook{cb.space, cb.points, kind});

  FoolingFamily fam;
  fam.kind = "voronoi_bumps";
  fam.metadata = "m=" + std::to_string(cb.size()) + " norm=" + to_string(kind) +
                 (cb.measure_tag.empty() ? "" : " measure=" + cb.measure_tag);
  for (Index i = 0; i < cb.size(); ++i) {
    fam.functionals.push_back(
        {"fooling(" + std::to_string(i) + ")",
         [shared, i](const Eigen::Ref<const Eigen::VectorXd>& x) { return fooling_value(*shared, i, x); },
         1.0, kind, std::nullopt});
  }
  return fam;
}

Functional signed_combination(const FoolingFamily& family, const std::vector<int>& signs) {
  if (static_cast<Index>(signs.size()) != family.size()) {
    throw ConfigError("signed_combination: one sign per family member expected");
  }
  for (int s : signs) {
    if (s != 1 && s != -1) throw ConfigError("signed_combination: signs must be +1 or -1");
  }
  const NormKind kind = family.functionals.empty() ? NormKind::Sup : family.functionals.front().lip_norm;
  auto members = std::make_shared<const std::vector<Functional>>(family.functionals);
  return {"signed_combination",
          [members, signs](const Eigen::Ref<const Eigen::VectorXd>& x) {
            double acc = 0.0;
            for (std::size_t i = 0; i < members->size(); ++i) acc += signs[i] * (*members)[i](x);
            return acc;
          },
          1.0, kind, std::nullopt};
}

Index max_support_overlap(const FoolingFamily& family, const Eigen::Ref<const Eigen::MatrixXd>& samples) {
  Index worst = 0;
  for (Index s = 0; s < samples.cols(); ++s) {
    Index positive = 0;
    for (const auto& f : family.functionals) positive += f(samples.col(s)) > 0.0 ? 1 : 0;
    worst = std::max(worst, positive);
  }
  return worst;
}

GapReport gap_identity_check(const Codebook& cb, const MeasureSpec& measure, Index M,
                             const SeedSpec& seed) {
  cb.validate();
  const Index m = cb.size();
  if (m < 2) throw ConfigError("gap_identity_check: needs m >= 2 codebook points");
  if (M < 100) throw ConfigError("gap_identity_check: M must be >= 100");
  require_same_space(cb.space, space_of(measure), "gap_identity_check");

  Codebook head = cb;
  head.points = cb.points.leftCols(m - 1);
  head.weights.reset();
  const auto last = cb.points.col(m - 1);

  const Index chunks = (M + kChunk - 1) / kChunk;
  struct Partial {
    RunningStats fm, without_last, with_last;
  };
  std::vector<Partial> parts(static_cast<std::size_t>(chunks));
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const Index first = static_cast<Index>(c) * kChunk;
    const Index len = std::min(kChunk, M - first);
    Eigen::MatrixXd buf(cb.space.flat_size(), len);
    sample_into(measure, seed, first, buf);
    const auto nn = nearest_all(head, buf);
    for (Index i = 0; i < len; ++i) {
      const double d_rest = nn[i].distance;
      const double d_last = norm(cb.space, buf.col(i) - last, cb.norm);
      parts[c].fm.add(0.5 * std::max(0.0, d_rest - d_last));
      parts[c].without_last.add(d_rest);
      parts[c].with_last.add(std::min(d_rest, d_last));
    }
  });
  Partial total;
  for (const auto& p : parts) {
    total.fm.merge(p.fm);
    total.without_last.merge(p.without_last);
    total.with_last.merge(p.with_last);
  }

  GapReport rep;
  rep.sample_count = M;
  rep.lhs = total.fm.mean();
  rep.lhs_se = total.fm.stderr_mean();
  rep.rhs = 0.5 * (total.without_last.mean() - total.with_last.mean());
  rep.rhs_se = 0.5 * std::hypot(total.without_last.stderr_mean(), total.with_last.stderr_mean());
  rep.difference = rep.lhs - rep.rhs;
  rep.combined_se = std::hypot(rep.lhs_se, rep.rhs_se);
  const double floor = 1e-12 * (1.0 + std::abs(rep.lhs) + std::abs(rep.rhs));
  rep.passed = std::abs(rep.difference) <= 3.0 * rep.combined_se + floor;
  return rep;
}

Functional increment_functional(const IncrementFamilySpec& spec, const GridPtr& grid) {
  if (spec.ell < 1) throw ConfigError("increment_functional: ell must be >= 1");
  if (!(spec.eps > 0.0 && spec.eps <= 1.0)) throw ConfigError("increment_functional: eps must lie in (0, 1]");
  if (!(spec.theta >= 0.0) || !std::isfinite(spec.theta)) {
    throw ConfigError("increment_functional: theta must be >= 0");
  }
  std::vector<int> alpha = spec.alpha;
  if (alpha.empty()) alpha.assign(static_cast<std::size_t>(spec.ell), 0);
  if (static_cast<Index>(alpha.size()) != spec.ell) {
    throw ConfigError("increment_functional: alpha needs ell entries");
  }
  std::vector<Index> at(static_cast<std::size_t>(spec.ell + 1));
  std::vector<double> sigma(static_cast<std::size_t>(spec.ell));
  for (Index i = 0; i <= spec.ell; ++i) {
    const double s = static_cast<double>(i) * spec.eps / static_cast<double>(spec.ell);
    const auto j = grid->index_of(s);
    if (!j) {
      throw ConfigError("increment_functional: s_" + std::to_string(i) + " = " + fmt(s) +
                        " is not a grid point");
    }
    at[i] = *j;
  }
  for (Index i = 0; i < spec.ell; ++i) {
    if (alpha[i] != 0 && alpha[i] != 1) throw ConfigError("increment_functional: alpha entries are 0 or 1");
    sigma[i] = alpha[i] == 0 ? 1.0 : -1.0;
  }
  const double theta = spec.theta;
  const Index g = grid->size();
  std::ostringstream name;
  name << "increment(ell=" << spec.ell << ",eps=" << spec.eps << ",theta=" << spec.theta << ")";
  return {name.str(),
          [at, sigma, theta, g](const Eigen::Ref<const Eigen::VectorXd>& x) {
            if (x.size() != g) throw ConfigError("increment functional: path length does not match grid");
            double slack = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < sigma.size(); ++i) {
              slack = std::min(slack, std::max(0.0, sigma[i] * (x[at[i + 1]] - x[at[i]]) - theta));
            }
            return 0.5 * slack;
          },
          1.0, NormKind::Sup, std::nullopt};
}

EventReport event_probability(Index ell, double eps, Index M, const SeedSpec& seed, const GridPtr& grid,
                              std::vector<int> alpha) {
  if (M < 10000) throw ConfigError("event_probability: M must be >= 10^4");
  if (ell < 1) throw ConfigError("event_probability: ell must be >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("event_probability: eps must lie in (0, 1]");
  if (alpha.empty()) alpha.assign(static_cast<std::size_t>(ell), 0);
  if (static_cast<Index>(alpha.size()) != ell) throw ConfigError("event_probability: alpha needs ell entries");

  EventReport rep;
  rep.threshold = std::sqrt(eps) / std::pow(static_cast<double>(ell), 1.5);
  std::vector<Index> at(static_cast<std::size_t>(ell + 1));
  for (Index i = 0; i <= ell; ++i) {
    const auto j = grid->index_of(static_cast<double>(i) * eps / static_cast<double>(ell));
    if (!j) throw ConfigError("event_probability: s_" + std::to_string(i) + " is not a grid point");
    at[i] = *j;
  }
  const double thr = rep.threshold;
  const Estimate e = integrate_mc(
      brownian_on_grid(grid), seed, M, [&](const Eigen::Ref<const Eigen::VectorXd>& x, Index) {
        for (Index i = 0; i < ell; ++i) {
          const double inc = x[at[i + 1]] - x[at[i]];
          const double signed_inc = alpha[i] == 0 ? inc : -inc;
          if (!(signed_inc >= thr)) return 0.0;
        }
        return 1.0;
      });
  rep.estimate = e.value;
  rep.std_error = e.std_error;
  rep.sample_count = M;
  const double p = 0.5 * std::erfc(1.0 / (static_cast<double>(ell) * std::sqrt(2.0)));
  rep.analytic = std::pow(p, static_cast<double>(ell));
  rep.cap = std::ldexp(1.0, -static_cast<int>(ell));
  return rep;
}

double bakhvalov_lower_bound(Index n, const std::vector<Estimate>& family_means) {
  if (n < 1) throw ConfigError("bakhvalov_lower_bound: n must be >= 1");
  const auto m = static_cast<Index>(family_means.size());
  if (m < 4 * n) {
    throw ConfigError("bakhvalov_lower_bound: precondition 'Let m >= 4n' violated (m=" + std::to_string(m) +
                      ", n=" + std::to_string(n) + ")");
  }
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& e : family_means) lowest = std::min(lowest, e.value - 3.0 * e.std_error);
  return std::max(0.0, 0.25 * std::sqrt(static_cast<double>(n)) * lowest);
}

Functional subspace_blind_functional(const Subspace& sub) {
  auto shared = std::make_shared<const Subspace>(sub);
  const Space space = sub.space();
  return {"subspace_blind(" + sub.kind_name() + "," + std::to_string(sub.dim()) + ")",
          [shared, space](const Eigen::Ref<const Eigen::VectorXd>& x) {
            const double r = project(x, *shared).residual_l2;
            const double scale = std::max(1.0, norm(space, x, NormKind::L2));
            return r <= 1e-12 * scale ? 0.0 : r;
          },
          1.0, NormKind::Sup, std::nullopt};
}

LipschitzReport lipschitz_check(const Functional& f, const MeasureSpec& measure, Index pairs,
                                const SeedSpec& seed, std::optional<NormKind> norm_kind) {
  if (pairs < 100) throw ConfigError("lipschitz_check: pairs must be >= 100");
  validate(measure);
  const Space space = space_of(measure);
  const NormKind kind = norm_kind.value_or(f.lip_norm);
  require_norm_valid(space, kind);

  LipschitzReport rep;
  rep.claim = f.lip_claim;
  const Eigen::MatrixXd xs = sample(measure, seed.child(1), 2 * pairs).data;
  auto consider = [&](const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                      Index index) {
    const double d = norm(space, x - y, kind);
    if (d == 0.0) {
      ++rep.pairs_skipped;
      return;
    }
    ++rep.pairs_checked;
    rep.max_ratio = std::max(rep.max_ratio, std::abs(evaluate(f, x, index) - evaluate(f, y, index)) / d);
  };
  for (Index i = 0; i < pairs; ++i) consider(xs.col(2 * i), xs.col(2 * i + 1), 2 * i);

  const Index flat = space.flat_size();
  for (Index i = 0; i < pairs; ++i) {
    RandomStream rs(seed.child(2), static_cast<std::uint64_t>(i));
    const double amp = 1e-3 * (0.1 + rs.uniform());
    Eigen::VectorXd bump = Eigen::VectorXd::Zero(flat);
    if (space.is_path()) {
      const Index g = space.grid->size();
      const auto channel = static_cast<Index>(rs.below(static_cast<std::uint64_t>(space.dim)));
      const auto centre = static_cast<Index>(rs.below(static_cast<std::uint64_t>(g)));
      const Index half = 1 + static_cast<Index>(rs.below(static_cast<std::uint64_t>(std::max<Index>(1, g / 8))));
      for (Index j = std::max<Index>(0, centre - half); j <= std::min(g - 1, centre + half); ++j) {
        bump[channel * g + j] = 1.0 - static_cast<double>(std::abs(j - centre)) / static_cast<double>(half + 1);
      }
      if (rs.uniform() < 0.5) bump = -bump;
    } else {
      for (Index j = 0; j < flat; ++j) bump[j] = rs.normal();
      bump /= std::max(bump.norm(), 1e-300);
    }
    const Eigen::VectorXd x = xs.col(2 * i);
    consider(x, x + amp * bump, 2 * i);
  }
  rep.flagged = rep.max_ratio > rep.claim * (1.0 + 1e-9);
  return rep;
}

}  // namespace quantquad
