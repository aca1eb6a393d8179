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

#include "quantquad/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "quantquad/parallel.hpp"
#include "quantquad/quantize.hpp"

namespace quantquad {
namespace {


double trigamma(double y) {
  double acc = 0.0;
  while (y < 20.0) {
    acc += 1.0 / (y * y);
    y += 1.0;
  }
  const double iy = 1.0 / y, iy2 = iy * iy;
  return acc + iy + 0.5 * iy2 +
         iy * iy2 * (1.0 / 6.0 - iy2 * (1.0 / 30.0 - iy2 * (1.0 / 42.0 - iy2 / 30.0)));
}

std::string seed_text(const SeedSpec& s) {
  return std::to_string(s.master_seed) + "/" + std::to_string(s.stream_index);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

const GridPtr& grid_of(const MeasureSpec& measure) {
  static const GridPtr none;
  if (const auto* b = std::get_if<BrownianKL>(&measure)) return b->grid;
  if (const auto* d = std::get_if<Diffusion>(&measure)) return d->grid;
  return none;
}

Index to_index(double size, const char* what) {
  const double r = std::round(size);
  if (r < 1.0 || std::abs(r - size) > 1e-9) {
    throw ConfigError(std::string(what) + ": ladder entries must be positive integers");
  }
  return static_cast<Index>(r);
}

// Root mean square of (estimate - reference) with delta-method stderr.
RatePoint rmse_point(double size, const std::vector<double>& estimates, double reference,
                     double reference_se) {
  RunningStats sq;
  for (double e : estimates) sq.add((e - reference) * (e - reference));
  RatePoint p;
  p.size = size;
  p.error = std::sqrt(sq.mean());
  const double se_rmse = p.error > 0.0 ? sq.stderr_mean() / (2.0 * p.error) : 0.0;
  p.std_error = std::hypot(se_rmse, reference_se);
  return p;
}

}  // namespace

std::string to_string(RateTransform t) {
  return t == RateTransform::LogLog ? "loglog" : "loglog-in-log";
}

RateTransform parse_rate_transform(const std::string& name) {
  if (name == "loglog") return RateTransform::LogLog;
  if (name == "loglog-in-log") return RateTransform::LogLogInLog;
  throw ConfigError("unknown rate transform '" + name + "' (expected loglog or loglog-in-log)");
}

RateFit rate_fit(const std::vector<RatePoint>& points, RateTransform transform) {
  RateFit fit;
  fit.transform = transform;
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    if (!(p.size > 0.0)) throw ConfigError("rate_fit: sizes must be > 0");
    if (!(p.error > 0.0)) {
      fit.warnings.push_back("dropped point at size " + fmt(p.size) + " with error " + fmt(p.error));
      continue;
    }
    double x = std::log(p.size);
    if (transform == RateTransform::LogLogInLog) {
      if (!(x > 0.0)) throw ConfigError("rate_fit: loglog-in-log needs sizes > 1");
      x = std::log(x);
    }
    xs.push_back(x);
    ys.push_back(std::log(p.error));
  }
  const auto m = static_cast<Index>(xs.size());
  if (m < 4) throw ConfigError("rate_fit: needs at least 4 points with positive error");
  fit.points_used = m;
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), m), y(ys.data(), m);
  const Eigen::VectorXd dx = x.array() - x.mean();
  const Eigen::VectorXd dy = y.array() - y.mean();
  const double sxx = dx.squaredNorm();
  if (!(sxx > 0.0)) throw ConfigError("rate_fit: sizes must not all coincide");
  fit.slope = dx.dot(dy) / sxx;
  fit.intercept = y.mean() - fit.slope * x.mean();
  const double ss_res = (dy - fit.slope * dx).squaredNorm();
  const double ss_tot = dy.squaredNorm();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.slope_se = m > 2 ? std::sqrt(ss_res / static_cast<double>(m - 2) / sxx) : 0.0;
  return fit;
}

RatePoint width_estimate(const MeasureSpec& measure, const Subspace& sub, double p, Index M,
                         const SeedSpec& seed, NormKind norm_kind) {
  if (M < 1000) throw ConfigError("width_estimate: M must be >= 10^3");
  if (!(p > 0.0)) throw ConfigError("width_estimate: p must be > 0");
  validate(measure);
  require_same_space(sub.space(), space_of(measure), "width_estimate");
  require_norm_valid(sub.space(), norm_kind);
  const Estimate e = integrate_mc(measure, seed, M, [&](const Eigen::Ref<const Eigen::VectorXd>& x, Index) {
    const double r = project(x, sub).residual(norm_kind);
    return p == 2.0 ? r * r : std::pow(r, p);
  });
  RatePoint pt;
  pt.size = static_cast<double>(sub.dim());
  pt.error = e.value > 0.0 ? std::pow(e.value, 1.0 / p) : 0.0;
  pt.std_error = e.value > 0.0 ? std::pow(e.value, 1.0 / p - 1.0) / p * e.std_error : 0.0;
  return pt;
}

double kl_tail_width(Index k) {
  if (k < 0) throw ConfigError("kl_tail_width: k must be >= 0");
  const double pi = 3.14159265358979323846;
  return std::sqrt(trigamma(static_cast<double>(k) + 0.5)) / pi;
}

RateReport run_rate_experiment(const RateConfig& cfg) {
  if (cfg.ladder.size() < 4) throw ConfigError("rates: the ladder needs at least 4 sizes");
  if (cfg.replications < 2) throw ConfigError("rates: replications must be >= 2");
  validate(cfg.measure);
  const std::string& algo = cfg.algorithm;
  const bool replicated = algo == "mc" || algo == "vrmc" || algo == "euler" || algo == "gauss-sub";
  if (!replicated && algo != "pq" && algo != "width") {
    throw ConfigError("rates: unknown algorithm '" + algo + "'");
  }
  if (replicated && !cfg.functional) throw ConfigError("rates: algorithm '" + algo + "' needs a functional");
  if (algo == "euler" && !std::holds_alternative<Diffusion>(cfg.measure)) {
    throw ConfigError("rates: euler needs a diffusion measure");
  }
  if ((algo == "gauss-sub" || algo == "pq" || algo == "width") && !space_of(cfg.measure).is_path()) {
    throw ConfigError("rates: algorithm '" + algo + "' needs a Brownian path measure");
  }
  if (algo == "vrmc" && cfg.codebook != "lattice" && cfg.codebook != "lloyd") {
    throw ConfigError("rates: codebook must be lattice or lloyd");
  }
  if (algo == "vrmc" && cfg.codebook == "lattice" && !std::holds_alternative<UniformCube>(cfg.measure)) {
    throw ConfigError("rates: lattice codebooks need a uniform_cube measure");
  }

  RateReport rep;
  rep.log.push_back("master_seed=" + std::to_string(cfg.seed.master_seed) +
                    " stream=" + std::to_string(cfg.seed.stream_index));

  // Schedules first, so an infeasible ladder fails before any sampling.
  std::vector<Schedule> plan;
  for (double size : cfg.ladder) {
    if (algo == "euler") {
      plan.push_back(t8_schedule(size));
    } else if (algo == "gauss-sub") {
      plan.push_back(galg_schedule(size, cfg.profile));
    } else {
      const Index s = to_index(size, "rates");
      plan.push_back({s, s});
    }
  }

  if (replicated) {
    const Functional& f = *cfg.functional;
    Index n_max = 0, k_max = 0;
    for (const auto& s : plan) {
      n_max = std::max(n_max, s.n);
      k_max = std::max(k_max, s.k);
    }
    const SeedSpec ref_seed = cfg.seed.child(7);
    if (cfg.exact_reference) {
      rep.reference = *cfg.exact_reference;
      rep.reference_se = 0.0;
      rep.log.push_back("reference=exact value=" + fmt(rep.reference));
    } else {
      const Index budget = cfg.reference_budget > 0 ? cfg.reference_budget : std::max<Index>(10000, 20 * n_max);
      MeasureSpec ref_measure = cfg.measure;
      std::string extra;
      if (auto* d = std::get_if<Diffusion>(&ref_measure); d && algo == "euler") {
        d->k_steps = cfg.reference_k > 0 ? cfg.reference_k : 2 * k_max - 1;
        extra = " k=" + std::to_string(d->k_steps);
      }
      const Estimate e = reference_value(f, ref_measure, budget, ref_seed);
      rep.reference = e.value;
      rep.reference_se = e.std_error;
      rep.log.push_back("reference=mc budget=" + std::to_string(budget) + extra + " seed=" + seed_text(ref_seed) +
                        " value=" + fmt(e.value) + " stderr=" + fmt(e.std_error));
    }

    for (std::size_t li = 0; li < cfg.ladder.size(); ++li) {
      const Schedule sch = plan[li];
      const SeedSpec base = cfg.seed.child(0x100 + li);
      std::optional<Codebook> cb;
      std::optional<Subspace> sub;
      if (algo == "vrmc") {
        if (cfg.codebook == "lattice") {
          cb = midpoint_lattice_codebook(std::get<UniformCube>(cfg.measure).dim, sch.n);
        } else {
          LloydOptions opts;
          opts.pool_size = std::max(cfg.lloyd_pool, sch.n);
          cb = lloyd(cfg.measure, sch.n, 2.0, opts, base.child(1)).codebook;
          voronoi_weights(*cb, cfg.measure, std::max<Index>(100, 100 * sch.n), base.child(2));
        }
      } else if (algo == "gauss-sub") {
        sub = make_kl_subspace(sch.k, grid_of(cfg.measure));
      }
      std::vector<double> estimates(static_cast<std::size_t>(cfg.replications));
      for (Index r = 0; r < cfg.replications; ++r) {
        const SeedSpec rs = base.child(3).child(static_cast<std::uint64_t>(r));
        QuadratureResult q;
        if (algo == "mc") {
          q = classical_mc(cfg.measure, f, sch.n, rs);
        } else if (algo == "vrmc") {
          q = vr_mc(*cb, cfg.measure, f, sch.n, rs);
        } else if (algo == "euler") {
          const auto& d = std::get<Diffusion>(cfg.measure);
          q = euler_mc(d.spec, f, sch.k, sch.n, rs, d.grid);
        } else {
          q = gaussian_subspace_mc(*sub, f, sch.n, rs);
        }
        estimates[r] = q.estimate;
      }
      RateRow row;
      row.point = rmse_point(cfg.ladder[li], estimates, rep.reference, rep.reference_se);
      row.n = sch.n;
      row.k = sch.k;
      rep.rows.push_back(row);
      rep.log.push_back("size=" + fmt(cfg.ladder[li]) + " n=" + std::to_string(sch.n) +
                        " k=" + std::to_string(sch.k) + " seed=" + seed_text(base));
    }

    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.rows) smallest = std::min(smallest, r.point.error);
    if (rep.reference_se > 0.1 * smallest) {
      throw NumericError("rates: reference too noisy (stderr " + fmt(rep.reference_se) +
                             " exceeds 10% of the smallest RMSE " + fmt(smallest) +
                             "); raise reference_budget",
                         0);
    }
  } else {
    const GridPtr& grid = grid_of(cfg.measure);
    for (std::size_t li = 0; li < cfg.ladder.size(); ++li) {
      const Index s = plan[li].n;
      const SeedSpec base = cfg.seed.child(0x100 + li);
      RateRow row;
      if (algo == "pq") {
        const ProductQuantizer pq = product_quantizer_bm(s, 200, grid);
        Codebook cb = pq.codebook;
        cb.norm = cfg.norm;
        const DistortionEstimate d = distortion(cb, cfg.measure, cfg.order, cfg.distortion_samples, base);
        row.point = {static_cast<double>(pq.size), d.value, d.std_error};
        row.n = pq.size;
        row.k = cb.cost_dim();
      } else {
        row.point = width_estimate(cfg.measure, make_kl_subspace(s, grid), cfg.order,
                                   cfg.distortion_samples, base, cfg.norm);
        row.n = cfg.distortion_samples;
        row.k = s;
      }
      rep.rows.push_back(row);
      rep.log.push_back("size=" + fmt(cfg.ladder[li]) + " seed=" + seed_text(base));
    }
  }

  std::vector<RatePoint> pts;
  for (const auto& r : rep.rows) pts.push_back(r.point);
  rep.fit = rate_fit(pts, cfg.transform);
  for (const auto& w : rep.fit.warnings) rep.log.push_back("warning: " + w);
  if (cfg.slope_lo) rep.slope_ok = rep.slope_ok && rep.fit.slope >= *cfg.slope_lo;
  if (cfg.slope_hi) rep.slope_ok = rep.slope_ok && rep.fit.slope <= *cfg.slope_hi;
  if (cfg.require_decreasing) {
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
      if (!(rep.rows[i].point.error < rep.rows[i - 1].point.error)) rep.decreasing_ok = false;
    }
  }
  rep.passed = rep.slope_ok && rep.decreasing_ok;
  return rep;
}

std::string rate_table_csv(const RateReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "size,rmse,stderr,n,k,slope,pass\n";
  for (const auto& r : report.rows) {
    os << r.point.size << ',' << r.point.error << ',' << r.point.std_error << ',' << r.n << ',' << r.k << ','
       << report.fit.slope << ',' << (report.passed ? "pass" : "fail") << '\n';
  }
  return os.str();
}

std::string rate_plot_csv(const RateReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "size,error,stderr,fit\n";
  for (const auto& r : report.rows) {
    double x = std::log(r.point.size);
    if (report.fit.transform == RateTransform::LogLogInLog) x = std::log(x);
    os << r.point.size << ',' << r.point.error << ',' << r.point.std_error << ','
       << std::exp(report.fit.intercept + report.fit.slope * x) << '\n';
  }
  return os.str();
}

}  // namespace quantquad
