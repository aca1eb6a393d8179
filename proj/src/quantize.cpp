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

#include "quantquad/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_map>

#include "quantquad/parallel.hpp"
#include "quantquad/subspace.hpp"

namespace quantquad {
namespace {

constexpr Index kSampleChunk = 1024;
constexpr Index kExpandedMinPoints = 32;
constexpr Index kExpandedBlock = 128;

double sequential_sum(const Eigen::VectorXd& v) {
  return std::accumulate(v.data(), v.data() + v.size(), 0.0);
}

// Nudges the largest entry until the left-to-right sum is exactly one.
void normalise_exactly(Eigen::VectorXd& w) {
  Index imax = 0;
  w.maxCoeff(&imax);
  for (int pass = 0; pass < 8; ++pass) {
    const double s = sequential_sum(w);
    if (s == 1.0) return;
    w[imax] += 1.0 - s;
  }
}

double power(double d, double r) {
  if (r == 1.0) return d;
  if (r == 2.0) return d * d;
  return std::pow(d, r);
}

Eigen::VectorXd flat_weights(const Space& space, NormKind kind) {
  if (kind == NormKind::L2) return space.grid->weights().replicate(space.dim, 1);
  return Eigen::VectorXd::Ones(space.flat_size());
}

bool column_less(const Eigen::MatrixXd& m, Index a, Index b) {
  for (Index r = 0; r < m.rows(); ++r) {
    if (m(r, a) != m(r, b)) return m(r, a) < m(r, b);
  }
  return false;
}

}  // namespace

void Codebook::validate() const {
  if (points.cols() < 1) throw ConfigError("codebook needs n >= 1 points");
  require_shape(space, points.rows(), "codebook");
  require_norm_valid(space, norm);
  if (!(order_r > 0.0)) throw ConfigError("codebook order r must be > 0");
  if (!points.allFinite()) throw ConfigError("codebook points must be finite");
  if (weights) {
    if (weights->size() != points.cols()) throw ConfigError("codebook weights: wrong length");
    if ((weights->array() < 0.0).any()) throw ConfigError("codebook weights must be >= 0");
    if (std::abs(sequential_sum(*weights) - 1.0) > 1e-12) {
      throw ConfigError("codebook weights must sum to 1");
    }
  }
}

void Codebook::require_distinct() const {
  std::vector<Index> order(static_cast<std::size_t>(size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [this](Index a, Index b) { return column_less(points, a, b); });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (points.col(order[i]) == points.col(order[i - 1])) {
      throw ConfigError("codebook points " + std::to_string(std::min(order[i], order[i - 1])) +
                        " and " + std::to_string(std::max(order[i], order[i - 1])) +
                        " coincide");
    }
  }
}

Codebook make_scalar_codebook(const std::vector<double>& values, double r, std::string measure_tag) {
  Codebook cb;
  cb.space = Space::euclidean(1);
  cb.points = Eigen::Map<const Eigen::RowVectorXd>(values.data(), static_cast<Index>(values.size()));
  cb.order_r = r;
  cb.norm = NormKind::Euclidean;
  cb.measure_tag = std::move(measure_tag);
  cb.validate();
  return cb;
}

Nearest nearest(const Codebook& cb, const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_shape(cb.space, x.size(), "nearest");
  Nearest best{0, std::numeric_limits<double>::infinity()};
  for (Index i = 0; i < cb.size(); ++i) {
    const double d = norm(cb.space, x - cb.points.col(i), cb.norm);
    if (d < best.distance) best = {i, d};
  }
  return best;
}

std::vector<Nearest> nearest_all(const Codebook& cb, const Eigen::Ref<const Eigen::MatrixXd>& samples) {
  require_shape(cb.space, samples.rows(), "nearest_all");
  const Index count = samples.cols();
  std::vector<Nearest> out(static_cast<std::size_t>(count));
  const bool expanded = (cb.norm == NormKind::L2 || cb.norm == NormKind::Euclidean) &&
                        cb.size() >= kExpandedMinPoints;
  const Index blocks = (count + kExpandedBlock - 1) / kExpandedBlock;

  if (!expanded) {
    parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
      const Index first = static_cast<Index>(b) * kExpandedBlock;
      const Index last = std::min(count, first + kExpandedBlock);
      for (Index i = first; i < last; ++i) out[i] = nearest(cb, samples.col(i));
    });
    return out;
  }

  // ||x - c||_W^2 = ||x||^2 - 2 <x, c>_W + ||c||^2, then exact re-check of
  // every candidate within rounding distance of the minimum.
  const Eigen::VectorXd w = flat_weights(cb.space, cb.norm);
  const Eigen::MatrixXd cw = w.asDiagonal() * cb.points;
  const Eigen::RowVectorXd cn = cb.points.cwiseProduct(cw).colwise().sum();
  const double cn_max = cn.maxCoeff();
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    const Index first = static_cast<Index>(b) * kExpandedBlock;
    const Index len = std::min(count, first + kExpandedBlock) - first;
    const auto block = samples.middleCols(first, len);
    const Eigen::MatrixXd inner = cw.transpose() * block;
    for (Index s = 0; s < len; ++s) {
      const double xn = w.dot(block.col(s).cwiseAbs2());
      const Eigen::VectorXd d2 = (cn.transpose() - 2.0 * inner.col(s)).array() + xn;
      const double lo = d2.minCoeff();
      const double tol = 1e-9 * (xn + cn_max) + 1e-300;
      Nearest best{0, std::numeric_limits<double>::infinity()};
      for (Index i = 0; i < d2.size(); ++i) {
        if (d2[i] > lo + tol) continue;
        const double d = norm(cb.space, block.col(s) - cb.points.col(i), cb.norm);
        if (d < best.distance) best = {i, d};
      }
      out[first + s] = best;
    }
  });
  return out;
}

DistortionEstimate distortion_from_distances(const std::vector<double>& dist, double r) {
  if (!(r > 0.0)) throw ConfigError("distortion order r must be > 0");
  RunningStats s;
  for (double d : dist) s.add(power(d, r));
  DistortionEstimate est;
  est.sample_count = static_cast<Index>(dist.size());
  est.order = r;
  const double m = s.mean();
  est.value = m > 0.0 ? std::pow(m, 1.0 / r) : 0.0;
  est.std_error = m > 0.0 ? std::pow(m, 1.0 / r - 1.0) / r * s.stderr_mean() : 0.0;
  return est;
}

DistortionEstimate distortion_on_pool(const Codebook& cb, const Eigen::Ref<const Eigen::MatrixXd>& pool,
                                      double r) {
  const auto nn = nearest_all(cb, pool);
  std::vector<double> dist(nn.size());
  for (std::size_t i = 0; i < nn.size(); ++i) dist[i] = nn[i].distance;
  return distortion_from_distances(dist, r);
}

DistortionEstimate distortion(const Codebook& cb, const MeasureSpec& measure, double r, Index M,
                              const SeedSpec& seed) {
  if (M < 100) throw ConfigError("distortion: M must be >= 100");
  cb.validate();
  require_same_space(cb.space, space_of(measure), "distortion");
  std::vector<double> dist(static_cast<std::size_t>(M));
  const Index flat = cb.space.flat_size();
  for (Index first = 0; first < M; first += kSampleChunk) {
    const Index len = std::min(kSampleChunk, M - first);
    Eigen::MatrixXd buf(flat, len);
    sample_into(measure, seed, first, buf);
    const auto nn = nearest_all(cb, buf);
    for (Index i = 0; i < len; ++i) dist[first + i] = nn[i].distance;
  }
  return distortion_from_distances(dist, r);
}

WeightReport voronoi_weights(Codebook& cb, const MeasureSpec& measure, Index M, const SeedSpec& seed) {
  if (M < 100) throw ConfigError("voronoi_weights: M must be >= 100");
  cb.validate();
  require_same_space(cb.space, space_of(measure), "voronoi_weights");
  std::vector<Index> counts(static_cast<std::size_t>(cb.size()), 0);
  const Index flat = cb.space.flat_size();
  for (Index first = 0; first < M; first += kSampleChunk) {
    const Index len = std::min(kSampleChunk, M - first);
    Eigen::MatrixXd buf(flat, len);
    sample_into(measure, seed, first, buf);
    for (const auto& nn : nearest_all(cb, buf)) ++counts[nn.index];
  }
  WeightReport rep;
  rep.sample_count = M;
  rep.weights.resize(cb.size());
  rep.std_error.resize(cb.size());
  const double inv = 1.0 / static_cast<double>(M);
  for (Index i = 0; i < cb.size(); ++i) {
    rep.weights[i] = static_cast<double>(counts[i]) * inv;
    if (counts[i] == 0) rep.empty_cells.push_back(i);
  }
  normalise_exactly(rep.weights);
  for (Index i = 0; i < cb.size(); ++i) {
    const double p = rep.weights[i];
    rep.std_error[i] = std::sqrt(std::max(0.0, p * (1.0 - p)) * inv);
  }
  cb.weights = rep.weights;
  return rep;
}

// ---------------------------------------------------------------- Lloyd ---

namespace {

struct RestartOutcome {
  Eigen::MatrixXd centers;
  std::vector<double> history;
  Index reseeded = 0;
};

// Partial Fisher-Yates over [0, pool_size) keeping only displaced slots.
std::vector<Index> draw_initial(Index pool_size, Index n, const SeedSpec& seed, Index restart) {
  RandomStream rs(seed, static_cast<std::uint64_t>(restart));
  std::unordered_map<Index, Index> moved;
  auto slot = [&moved](Index i) {
    const auto it = moved.find(i);
    return it == moved.end() ? i : it->second;
  };
  std::vector<Index> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto j = i + static_cast<Index>(rs.below(static_cast<std::uint64_t>(pool_size - i)));
    out[i] = slot(j);
    moved[j] = slot(i);
  }
  return out;
}

double pool_cost(const std::vector<Nearest>& nn, double r) {
  double acc = 0.0;
  for (const auto& v : nn) acc += power(v.distance, r);
  return acc / static_cast<double>(nn.size());
}

RestartOutcome lloyd_general(const Codebook& shape, const Eigen::MatrixXd& pool, double r,
                             const LloydOptions& opts, std::vector<Index> init) {
  const Index m = pool.cols();
  const Index n = static_cast<Index>(init.size());
  Codebook cb = shape;
  cb.points.resize(pool.rows(), n);
  for (Index j = 0; j < n; ++j) cb.points.col(j) = pool.col(init[j]);

  auto nn = nearest_all(cb, pool);
  double cost = pool_cost(nn, r);
  RestartOutcome out;
  out.history.push_back(cost);

  std::vector<double> scratch;
  for (Index it = 0; it < opts.iters; ++it) {
    std::vector<std::vector<Index>> members(static_cast<std::size_t>(n));
    for (Index i = 0; i < m; ++i) members[nn[i].index].push_back(i);

    Codebook next = cb;
    for (Index j = 0; j < n; ++j) {
      const auto& idx = members[j];
      if (idx.empty()) continue;
      Eigen::VectorXd cand(pool.rows());
      if (r == 2.0) {
        cand.setZero();
        for (Index i : idx) cand += pool.col(i);
        cand /= static_cast<double>(idx.size());
      } else {
        scratch.resize(idx.size());
        for (Index row = 0; row < pool.rows(); ++row) {
          for (std::size_t q = 0; q < idx.size(); ++q) scratch[q] = pool(row, idx[q]);
          const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>((idx.size() - 1) / 2);
          std::nth_element(scratch.begin(), mid, scratch.end());
          cand[row] = *mid;
        }
      }
      double old_cost = 0.0, new_cost = 0.0;
      for (Index i : idx) {
        old_cost += power(nn[i].distance, r);
        new_cost += power(norm(cb.space, pool.col(i) - cand, cb.norm), r);
      }
      if (new_cost < old_cost) next.points.col(j) = cand;
    }

    std::vector<double> dist(static_cast<std::size_t>(m));
    bool have_empty = false;
    for (Index j = 0; j < n; ++j) have_empty = have_empty || members[j].empty();
    if (have_empty) {
      for (Index i = 0; i < m; ++i) dist[i] = nn[i].distance;
      for (Index j = 0; j < n; ++j) {
        if (!members[j].empty()) continue;
        const auto far = static_cast<Index>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        next.points.col(j) = pool.col(far);
        ++out.reseeded;
        for (Index i = 0; i < m; ++i) {
          dist[i] = std::min(dist[i], norm(cb.space, pool.col(i) - next.points.col(j), cb.norm));
        }
      }
    }

    auto next_nn = nearest_all(next, pool);
    const double next_cost = pool_cost(next_nn, r);
    if (next_cost > cost) break;
    cb = std::move(next);
    nn = std::move(next_nn);
    out.history.push_back(next_cost);
    const bool done = cost - next_cost <= opts.tol * cost;
    cost = next_cost;
    if (done) break;
  }
  out.centers = cb.points;
  return out;
}

// One-dimensional problems: the pool is sorted once and every cell is a
// contiguous range, so assignment is a binary search per boundary and cell
// costs come from prefix sums.
class SortedPool {
 public:
  SortedPool(std::vector<double> values, bool squares) : xs_(std::move(values)) {
    std::sort(xs_.begin(), xs_.end());
    p1_.assign(xs_.size() + 1, 0.0L);
    for (std::size_t i = 0; i < xs_.size(); ++i) p1_[i + 1] = p1_[i] + xs_[i];
    if (!squares) return;
    p2_.assign(xs_.size() + 1, 0.0L);
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      p2_[i + 1] = p2_[i] + static_cast<long double>(xs_[i]) * xs_[i];
    }
  }

  Index size() const { return static_cast<Index>(xs_.size()); }
  double at(Index i) const { return xs_[i]; }

  // Cell ranges [bounds[j], bounds[j+1]) in sorted-centre order. Returns
  // false if two centres coincide.
  bool assign(const std::vector<double>& c, std::vector<Index>& order, std::vector<Index>& bounds) const {
    const Index n = static_cast<Index>(c.size());
    order.resize(c.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return c[a] < c[b] || (c[a] == c[b] && a < b);
    });
    bounds.assign(static_cast<std::size_t>(n + 1), 0);
    bounds[n] = size();
    for (Index j = 1; j < n; ++j) {
      const Index a = order[j - 1], b = order[j];
      if (c[a] == c[b]) return false;
      const auto it = std::partition_point(xs_.begin(), xs_.end(), [&](double x) {
        const double da = std::abs(x - c[a]), db = std::abs(x - c[b]);
        return !(db < da || (db == da && b < a));
      });
      bounds[j] = static_cast<Index>(it - xs_.begin());
    }
    return true;
  }

  long double cell_cost(Index lo, Index hi, double c, double r) const {
    const long double cnt = static_cast<long double>(hi - lo);
    const long double s1 = p1_[hi] - p1_[lo];
    if (r == 2.0) {
      const long double s2 = p2_[hi] - p2_[lo];
      return std::max(0.0L, s2 - 2.0L * c * s1 + static_cast<long double>(c) * c * cnt);
    }
    const auto q = static_cast<Index>(
        std::lower_bound(xs_.begin() + lo, xs_.begin() + hi, c) - xs_.begin());
    const long double left = static_cast<long double>(c) * (q - lo) - (p1_[q] - p1_[lo]);
    const long double right = (p1_[hi] - p1_[q]) - static_cast<long double>(c) * (hi - q);
    return std::max(0.0L, left + right);
  }

  double centre(Index lo, Index hi, double r) const {
    if (r == 2.0) return static_cast<double>((p1_[hi] - p1_[lo]) / static_cast<long double>(hi - lo));
    return xs_[lo + (hi - lo - 1) / 2];
  }

 private:
  std::vector<double> xs_;
  std::vector<long double> p1_, p2_;
};

double sorted_cost(const SortedPool& sp, const std::vector<double>& c, const std::vector<Index>& order,
                   const std::vector<Index>& bounds, double r) {
  long double acc = 0.0L;
  for (std::size_t j = 0; j < order.size(); ++j) {
    acc += sp.cell_cost(bounds[j], bounds[j + 1], c[order[j]], r);
  }
  return static_cast<double>(acc / static_cast<long double>(sp.size()));
}

std::optional<RestartOutcome> lloyd_sorted(const SortedPool& sp, double r, const LloydOptions& opts,
                                           std::vector<double> c) {
  const Index n = static_cast<Index>(c.size());

  std::vector<Index> order, bounds;
  if (!sp.assign(c, order, bounds)) return std::nullopt;
  double cost = sorted_cost(sp, c, order, bounds, r);
  RestartOutcome out;
  out.history.push_back(cost);

  for (Index it = 0; it < opts.iters; ++it) {
    std::vector<double> next = c;
    std::vector<Index> empty;
    for (Index j = 0; j < n; ++j) {
      const Index lo = bounds[j], hi = bounds[j + 1], id = order[j];
      if (lo == hi) {
        empty.push_back(id);
        continue;
      }
      const double cand = sp.centre(lo, hi, r);
      if (sp.cell_cost(lo, hi, cand, r) < sp.cell_cost(lo, hi, c[id], r)) next[id] = cand;
    }
    std::sort(empty.begin(), empty.end());
    for (Index id : empty) {
      // Farthest pool sample from the current codebook sits at a cell end.
      std::vector<Index> o2, b2;
      std::vector<double> cur = next;
      cur.erase(cur.begin() + id);  // the empty centre owns nothing yet
      if (!sp.assign(cur, o2, b2)) return std::nullopt;
      double far_d = -1.0;
      Index far_i = 0;
      for (std::size_t j = 0; j < o2.size(); ++j) {
        if (b2[j] == b2[j + 1]) continue;
        for (Index i : {b2[j], b2[j + 1] - 1}) {
          const double d = std::abs(sp.at(i) - cur[o2[j]]);
          if (d > far_d || (d == far_d && i < far_i)) {
            far_d = d;
            far_i = i;
          }
        }
      }
      next[id] = sp.at(far_i);
      ++out.reseeded;
    }

    std::vector<Index> next_order, next_bounds;
    if (!sp.assign(next, next_order, next_bounds)) return std::nullopt;
    const double next_cost = sorted_cost(sp, next, next_order, next_bounds, r);
    if (next_cost > cost) break;
    c = std::move(next);
    order = std::move(next_order);
    bounds = std::move(next_bounds);
    out.history.push_back(next_cost);
    const bool done = cost - next_cost <= opts.tol * cost;
    cost = next_cost;
    if (done) break;
  }
  out.centers = Eigen::Map<const Eigen::RowVectorXd>(c.data(), n);
  return out;
}

}  // namespace

LloydResult lloyd(const MeasureSpec& measure, Index n, double r, const LloydOptions& opts,
                  const SeedSpec& seed, std::optional<NormKind> norm_kind) {
  validate(measure);
  if (n < 1) throw ConfigError("lloyd: n must be >= 1");
  if (r != 1.0 && r != 2.0) throw ConfigError("lloyd: centroid steps support r = 1 or r = 2 only");
  if (opts.pool_size < n) throw ConfigError("lloyd: pool must hold at least n samples");
  if (opts.iters < 0 || opts.restarts < 1) throw ConfigError("lloyd: iters >= 0 and restarts >= 1");

  const Space space = space_of(measure);
  const NormKind kind = norm_kind.value_or(space.is_path() ? NormKind::L2 : NormKind::Euclidean);
  require_norm_valid(space, kind);

  Codebook shape;
  shape.space = space;
  shape.order_r = r;
  shape.norm = kind;
  shape.measure_tag = measure_tag(measure);

  Eigen::MatrixXd pool = sample(measure, seed.child(1), opts.pool_size).data;
  std::vector<std::vector<Index>> inits;
  for (Index rs = 0; rs < opts.restarts; ++rs) {
    inits.push_back(draw_initial(opts.pool_size, n, seed.child(2), rs));
  }

  std::vector<std::optional<RestartOutcome>> runs(static_cast<std::size_t>(opts.restarts));
  if (opts.fast_1d && space.flat_size() == 1) {
    std::vector<std::vector<double>> starts;
    for (const auto& init : inits) {
      std::vector<double> c;
      for (Index i : init) c.push_back(pool(0, i));
      starts.push_back(std::move(c));
    }
    std::vector<double> values(pool.data(), pool.data() + pool.size());
    pool.resize(0, 0);  // large 1-D pools: keep one copy only
    const SortedPool sorted(std::move(values), r == 2.0);
    for (Index rs = 0; rs < opts.restarts; ++rs) runs[rs] = lloyd_sorted(sorted, r, opts, starts[rs]);
  }
  for (Index rs = 0; rs < opts.restarts; ++rs) {
    if (runs[rs]) continue;
    if (pool.size() == 0) pool = sample(measure, seed.child(1), opts.pool_size).data;
    runs[rs] = lloyd_general(shape, pool, r, opts, inits[rs]);
  }

  Index best_restart = 0;
  for (Index rs = 1; rs < opts.restarts; ++rs) {
    if (runs[rs]->history.back() < runs[best_restart]->history.back()) best_restart = rs;
  }
  const RestartOutcome* best = &*runs[best_restart];

  LloydResult out;
  out.codebook = shape;
  out.codebook.points = best->centers;
  out.history = best->history;
  out.restart = best_restart;
  out.reseeded_cells = best->reseeded;
  return out;
}

// ------------------------------------------------- scalar Gaussian codebook ---

namespace {

double upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double cell_probability(double a, double b) {
  if (a >= 0.0) return upper_tail(a) - upper_tail(b);
  return normal_cdf(b) - normal_cdf(a);
}

double pdf_or_zero(double x) { return std::isinf(x) ? 0.0 : normal_pdf(x); }
double x_pdf_or_zero(double x) { return std::isinf(x) ? 0.0 : x * normal_pdf(x); }

double inverse_normal_cdf(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct GaussianQuantizer {
  Eigen::VectorXd centres;
  Eigen::VectorXd probabilities;
  double distortion_sq = 0.0;
};

Eigen::VectorXd cell_bounds(const Eigen::VectorXd& c) {
  const Index n = c.size();
  Eigen::VectorXd b(n + 1);
  b[0] = -std::numeric_limits<double>::infinity();
  b[n] = std::numeric_limits<double>::infinity();
  for (Index i = 1; i < n; ++i) b[i] = 0.5 * (c[i - 1] + c[i]);
  return b;
}

GaussianQuantizer solve_gaussian(Index n) {
  Eigen::VectorXd c(n);
  for (Index i = 0; i < n; ++i) {
    c[i] = inverse_normal_cdf((2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));
  }
  for (int it = 0; it < 1000000; ++it) {
    const Eigen::VectorXd b = cell_bounds(c);
    Eigen::VectorXd next(n);
    for (Index i = 0; i < n; ++i) {
      next[i] = (pdf_or_zero(b[i]) - pdf_or_zero(b[i + 1])) / cell_probability(b[i], b[i + 1]);
    }
    for (Index i = 0; i < n / 2; ++i) {
      const double s = 0.5 * (next[n - 1 - i] - next[i]);
      next[i] = -s;
      next[n - 1 - i] = s;
    }
    if (n % 2 == 1) next[n / 2] = 0.0;
    const double change = (next - c).cwiseAbs().maxCoeff();
    c = next;
    if (change < 1e-15) break;
  }
  GaussianQuantizer q;
  q.centres = c;
  q.probabilities.resize(n);
  const Eigen::VectorXd b = cell_bounds(c);
  for (Index i = 0; i < n; ++i) {
    const double p = cell_probability(b[i], b[i + 1]);
    const double ez = pdf_or_zero(b[i]) - pdf_or_zero(b[i + 1]);
    const double ez2 = p + x_pdf_or_zero(b[i]) - x_pdf_or_zero(b[i + 1]);
    q.probabilities[i] = p;
    q.distortion_sq += ez2 - 2.0 * c[i] * ez + c[i] * c[i] * p;
  }
  normalise_exactly(q.probabilities);
  return q;
}

const GaussianQuantizer& cached_gaussian(Index n) {
  static std::mutex mu;
  static std::map<Index, GaussianQuantizer> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, solve_gaussian(n)).first;
  return it->second;
}

}  // namespace

Codebook scalar_gaussian_quantizer(Index levels) {
  if (levels < 1) throw ConfigError("scalar_gaussian_quantizer: levels must be >= 1");
  const auto& q = cached_gaussian(levels);
  Codebook cb;
  cb.space = Space::euclidean(1);
  cb.points = q.centres.transpose();
  cb.weights = q.probabilities;
  cb.order_r = 2.0;
  cb.norm = NormKind::Euclidean;
  cb.measure_tag = "std_normal:1";
  return cb;
}

double scalar_gaussian_distortion_sq(Index levels) {
  if (levels < 1) throw ConfigError("scalar_gaussian_distortion_sq: levels must be >= 1");
  return cached_gaussian(levels).distortion_sq;
}

ProductQuantizer product_quantizer_bm(Index n_budget, Index k_terms, const GridPtr& grid) {
  if (n_budget < 1) throw ConfigError("product_quantizer_bm: n_budget must be >= 1");
  if (k_terms < 1) throw ConfigError("product_quantizer_bm: k_terms must be >= 1");

  ProductQuantizer pq;
  pq.levels.assign(static_cast<std::size_t>(k_terms), 1);
  Index prod = 1;
  for (;;) {
    double best_gain = -1.0;
    Index best_l = -1;
    for (Index l = 0; l < k_terms; ++l) {
      const Index lv = pq.levels[l];
      if (prod / lv * (lv + 1) > n_budget) continue;
      const double gain = kl_eigenvalue(l + 1) *
                          (scalar_gaussian_distortion_sq(lv) - scalar_gaussian_distortion_sq(lv + 1));
      if (gain > best_gain) {
        best_gain = gain;
        best_l = l;
      }
    }
    if (best_l < 0) break;
    prod = prod / pq.levels[best_l] * (pq.levels[best_l] + 1);
    ++pq.levels[best_l];
  }
  pq.size = prod;

  std::vector<Index> active;
  for (Index l = 0; l < k_terms; ++l) {
    if (pq.levels[l] > 1) active.push_back(l);
  }
  const Index g = grid->size();
  const auto na = static_cast<Index>(active.size());
  Eigen::MatrixXd basis(g, std::max<Index>(na, 1));
  basis.setZero();
  for (Index a = 0; a < na; ++a) {
    const Index l = active[a] + 1;
    const double s = std::sqrt(kl_eigenvalue(l));
    for (Index j = 0; j < g; ++j) basis(j, a) = s * kl_eigenfunction(l, (*grid)[j]);
  }
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(basis.cols(), prod);
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(prod);
  for (Index q = 0; q < prod; ++q) {
    Index rest = q;
    for (Index a = 0; a < na; ++a) {
      const Codebook& sc = scalar_gaussian_quantizer(pq.levels[active[a]]);
      const Index lv = pq.levels[active[a]];
      const Index j = rest % lv;
      rest /= lv;
      coef(a, q) = sc.points(0, j);
      weights[q] *= (*sc.weights)[j];
    }
  }
  normalise_exactly(weights);

  Codebook& cb = pq.codebook;
  cb.space = Space::paths(grid, 1);
  cb.points = basis * coef;
  cb.weights = std::move(weights);
  cb.order_r = 2.0;
  cb.norm = NormKind::L2;
  cb.measure_tag = "brownian_kl:" + std::to_string(k_terms);
  cb.span_dim = std::max<Index>(na, 1);
  return pq;
}

Codebook midpoint_lattice_codebook(Index d, Index n) {
  if (d < 1 || n < 1) throw ConfigError("midpoint_lattice_codebook: d and n must be >= 1");
  std::vector<Index> primes;
  Index rest = n;
  for (Index p = 2; p * p <= rest; ++p) {
    while (rest % p == 0) {
      primes.push_back(p);
      rest /= p;
    }
  }
  if (rest > 1) primes.push_back(rest);
  std::sort(primes.rbegin(), primes.rend());
  std::vector<Index> axis(static_cast<std::size_t>(d), 1);
  for (Index p : primes) {
    auto smallest = std::min_element(axis.begin(), axis.end());
    *smallest *= p;
  }
  Codebook cb;
  cb.space = Space::euclidean(d);
  cb.points.resize(d, n);
  for (Index q = 0; q < n; ++q) {
    Index r = q;
    for (Index k = 0; k < d; ++k) {
      const Index j = r % axis[k];
      r /= axis[k];
      cb.points(k, q) = (2.0 * static_cast<double>(j) + 1.0) / (2.0 * static_cast<double>(axis[k]));
    }
  }
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  normalise_exactly(w);
  cb.weights = std::move(w);
  cb.order_r = 2.0;
  cb.norm = NormKind::Euclidean;
  cb.measure_tag = "uniform_cube:" + std::to_string(d);
  return cb;
}

Functional dist_to_codebook(const Codebook& cb) {
  cb.validate();
  auto shared = std::make_shared<const Codebook>(cb);
  return {"dist_to_codebook",
          [shared](const Eigen::Ref<const Eigen::VectorXd>& x) { return nearest(*shared, x).distance; },
          1.0, cb.norm, std::nullopt};
}

}  // namespace quantquad
