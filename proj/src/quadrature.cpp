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

#include "quantquad/quadrature.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "quantquad/parallel.hpp"

namespace quantquad {
namespace {

constexpr Index kChunk = 1024;

// Per-sample loop work counted by the arithmetic proxy.
constexpr std::uint64_t kOpsPerSample = 4;

CostLedger make_ledger(Index calls, Index k, std::uint64_t rng, std::uint64_t ops) {
  return {calls, k, calls * k, rng, ops};
}

QuadratureResult finish(double estimate, double se, Index calls, Index k, std::uint64_t rng,
                        std::uint64_t ops) {
  QuadratureResult r;
  r.estimate = estimate;
  r.std_error = se;
  r.cardinality = calls;
  r.subspace_dim = k;
  r.cost = make_ledger(calls, k, rng, ops);
  return r;
}

void require_weights(const Codebook& cb, const char* what) {
  if (!cb.weights) throw ConfigError(std::string(what) + ": codebook has no Voronoi weights");
}

std::function<double(const Eigen::Ref<const Eigen::VectorXd>&, Index)> checked(const Functional& f) {
  return [&f](const Eigen::Ref<const Eigen::VectorXd>& x, Index i) { return evaluate(f, x, i); };
}

// Smallest integer budget with n >= 2 and k >= 2.
double minimum_budget(const std::function<Schedule(double)>& raw) {
  for (double n = 3.0; n < 1e12; n = std::floor(n * 1.01) + 1.0) {
    const Schedule s = raw(n);
    if (s.n >= 2 && s.k >= 2) {
      double lo = std::max(3.0, std::floor(n / 1.01) - 1.0);
      while (true) {
        const Schedule t = raw(lo);
        if (t.n >= 2 && t.k >= 2) return lo;
        lo += 1.0;
      }
    }
  }
  return std::numeric_limits<double>::infinity();
}

Schedule checked_schedule(double budget, const std::function<Schedule(double)>& raw, const char* what) {
  if (!std::isfinite(budget) || !(std::log(budget) > 1.0)) {
    throw ConfigError(std::string(what) + ": budget N must satisfy ln N > 1");
  }
  const Schedule s = raw(budget);
  if (s.n < 2 || s.k < 2) {
    std::ostringstream os;
    os << what << ": budget " << budget << " gives n=" << s.n << ", k=" << s.k
       << "; the minimum feasible N is " << minimum_budget(raw);
    throw ConfigError(os.str());
  }
  if (static_cast<double>(s.n) * static_cast<double>(s.k) > budget) {
    throw std::logic_error(std::string(what) + ": k*n exceeds the budget");
  }
  return s;
}

}  // namespace

QuadratureResult voronoi_quadrature(const Codebook& cb, const Functional& f) {
  cb.validate();
  require_weights(cb, "voronoi_quadrature");
  const Index k = cb.cost_dim();
  require_oracle_dim(f, k);
  double acc = 0.0;
  for (Index i = 0; i < cb.size(); ++i) acc += (*cb.weights)[i] * evaluate(f, cb.points.col(i), i);
  return finish(acc, 0.0, cb.size(), k, 0, 2 * static_cast<std::uint64_t>(cb.size()));
}

QuadratureResult classical_mc(const MeasureSpec& measure, const Functional& f, Index n,
                              const SeedSpec& seed) {
  if (n < 2) throw ConfigError("classical_mc: n must be >= 2");
  validate(measure);
  const Index k = subspace_dim(measure);
  require_oracle_dim(f, k);
  std::uint64_t rng = 0;
  const Estimate e = integrate_mc(measure, seed, n, checked(f), &rng);
  return finish(e.value, e.std_error, n, k, rng, kOpsPerSample * static_cast<std::uint64_t>(n));
}

QuadratureResult vr_mc(const Codebook& cb, const MeasureSpec& measure, const Functional& f, Index n,
                       const SeedSpec& seed) {
  if (n < 2) throw ConfigError("vr_mc: n must be >= 2");
  validate(measure);
  cb.validate();
  require_weights(cb, "vr_mc");
  const Space space = space_of(measure);
  require_same_space(cb.space, space, "vr_mc");
  const Index k = std::max(subspace_dim(measure), cb.cost_dim());
  require_oracle_dim(f, k);

  Eigen::VectorXd at_points(cb.size());
  for (Index i = 0; i < cb.size(); ++i) at_points[i] = evaluate(f, cb.points.col(i), i);
  double control = 0.0;
  for (Index i = 0; i < cb.size(); ++i) control += (*cb.weights)[i] * at_points[i];

  const Index chunks = (n + kChunk - 1) / kChunk;
  std::vector<RunningStats> partial(static_cast<std::size_t>(chunks));
  std::vector<std::uint64_t> draws(static_cast<std::size_t>(chunks), 0);
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const Index first = static_cast<Index>(c) * kChunk;
    const Index len = std::min(kChunk, n - first);
    Eigen::MatrixXd buf(space.flat_size(), len);
    draws[c] = sample_into(measure, seed, first, buf);
    const auto nn = nearest_all(cb, buf);
    for (Index i = 0; i < len; ++i) {
      partial[c].add(evaluate(f, buf.col(i), first + i) - at_points[nn[i].index]);
    }
  });
  RunningStats total;
  for (const auto& p : partial) total.merge(p);
  std::uint64_t rng = 0;
  for (auto d : draws) rng += d;

  const auto ops = kOpsPerSample * static_cast<std::uint64_t>(n) +
                   static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(cb.size()) +
                   2 * static_cast<std::uint64_t>(cb.size());
  return finish(control + total.mean(), total.stderr_mean(), n + cb.size(), k, rng, ops);
}

QuadratureResult euler_mc(const DiffusionSpec& spec, const Functional& f, Index k, Index n,
                          const SeedSpec& seed, const GridPtr& grid) {
  if (n < 2) throw ConfigError("euler_mc: n must be >= 2");
  const MeasureSpec measure = Diffusion{spec, k, grid};
  validate(measure);
  const Index dim = subspace_dim(measure);
  require_oracle_dim(f, dim);
  std::uint64_t rng = 0;
  const Estimate e = integrate_mc(measure, seed, n, checked(f), &rng);
  const auto ops = static_cast<std::uint64_t>(n) * (kOpsPerSample + static_cast<std::uint64_t>(k));
  return finish(e.value, e.std_error, n, dim, rng, ops);
}

Schedule t8_schedule(double budget) {
  return checked_schedule(
      budget,
      [](double N) {
        const double root = std::sqrt(N), log_root = std::sqrt(std::log(N));
        return Schedule{static_cast<Index>(std::floor(root / log_root)),
                        static_cast<Index>(std::floor(root * log_root))};
      },
      "t8_schedule");
}

Schedule galg_schedule(double budget, const SmallBallProfile& profile) {
  if (!(profile.alpha > 0.0) || !std::isfinite(profile.alpha) || !std::isfinite(profile.beta)) {
    throw ConfigError("galg_schedule: small-ball alpha must be > 0");
  }
  const double a = profile.alpha, b = profile.beta;
  return checked_schedule(
      budget,
      [a, b](double N) {
        const double g = 2.0 * (a + b) / (2.0 + a);
        const double L = std::log(N);
        return Schedule{static_cast<Index>(std::floor(std::pow(N, 2.0 / (2.0 + a)) * std::pow(L, -g))),
                        static_cast<Index>(std::floor(std::pow(N, a / (2.0 + a)) * std::pow(L, g)))};
      },
      "galg_schedule");
}

QuadratureResult gaussian_subspace_mc(const Subspace& sub, const Functional& f, Index n,
                                      const SeedSpec& seed) {
  if (n < 2) throw ConfigError("gaussian_subspace_mc: n must be >= 2");
  if (sub.kind() != Subspace::Kind::KarhunenLoeve) {
    throw ConfigError("gaussian_subspace_mc: needs a Karhunen-Loeve subspace");
  }
  const Index k = sub.dim();
  require_oracle_dim(f, k);
  Eigen::VectorXd scale(k);
  for (Index l = 0; l < k; ++l) scale[l] = std::sqrt(kl_eigenvalue(l + 1));
  const Eigen::MatrixXd basis = sub.basis() * scale.asDiagonal();

  const Index chunks = (n + kChunk - 1) / kChunk;
  std::vector<RunningStats> partial(static_cast<std::size_t>(chunks));
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const Index first = static_cast<Index>(c) * kChunk;
    const Index len = std::min(kChunk, n - first);
    Eigen::MatrixXd z(k, len);
    for (Index i = 0; i < len; ++i) {
      RandomStream rs(seed, static_cast<std::uint64_t>(first + i));
      for (Index l = 0; l < k; ++l) z(l, i) = rs.normal();
    }
    const Eigen::MatrixXd x = basis * z;
    for (Index i = 0; i < len; ++i) partial[c].add(evaluate(f, x.col(i), first + i));
  });
  RunningStats total;
  for (const auto& p : partial) total.merge(p);
  const auto ops = static_cast<std::uint64_t>(n) * (kOpsPerSample + static_cast<std::uint64_t>(k));
  return finish(total.mean(), total.stderr_mean(), n, k,
                static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(k), ops);
}

CostLedger cost_of(const QuadratureResult& result) { return result.cost; }

std::string describe(const CostLedger& cost) {
  std::ostringstream os;
  os << "oracle_calls=" << cost.oracle_calls << " k=" << cost.subspace_dim
     << " oracle_cost=" << cost.oracle_cost << " rng_calls=" << cost.rng_calls
     << " arithmetic_proxy=" << cost.arithmetic_proxy;
  return os.str();
}

}  // namespace quantquad
