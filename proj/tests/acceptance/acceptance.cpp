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

// Acceptance checks. Each check prints one PASS/FAIL line; the exit status is
// the number of failures. `acceptance_tests 4 7` runs checks 4 and 7 only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "quantquad/adversary.hpp"
#include "quantquad/cli.hpp"
#include "quantquad/experiments.hpp"
#include "quantquad/io.hpp"
#include "quantquad/parallel.hpp"
#include "quantquad/quadrature.hpp"
#include "quantquad/quantize.hpp"

namespace quantquad {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects sub-results; a single failed expectation fails the check.
class Ledger {
 public:
  void expect(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    if (!ok || notes_.size() < 40) notes_.push_back(std::string(ok ? "" : "FAILED ") + what);
  }
  Outcome done() const {
    std::string s;
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    return {pass_, s};
  }

 private:
  bool pass_ = true;
  std::vector<std::string> notes_;
};

std::string num(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

template <typename Fn>
double simpson(Fn&& fn, double a, double b, int steps) {
  const double h = (b - a) / steps;
  double acc = fn(a) + fn(b);
  for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * fn(a + i * h);
  return acc * h / 3.0;
}

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<double> sorted_points(const Codebook& cb) {
  std::vector<double> v(cb.points.data(), cb.points.data() + cb.points.size());
  std::sort(v.begin(), v.end());
  return v;
}

// ------------------------------------------------------------------------

Outcome scalar_quantizers() {
  Ledger led;
  for (Index n : {2, 4, 8}) {
    LloydOptions o;
    o.pool_size = Index{1} << 26;
    o.restarts = 2;
    o.iters = 1000;
    const LloydResult res = lloyd(UniformCube{1}, n, 1.0, o, {1, static_cast<std::uint64_t>(n)});
    const auto c = sorted_points(res.codebook);
    double worst = 0.0;
    for (Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(c[i] - (2.0 * i + 1.0) / (2.0 * n)));
    const DistortionEstimate q = distortion(res.codebook, UniformCube{1}, 1.0, 1000000, {2, 0});
    const double target = 1.0 / (4.0 * n);
    led.expect(worst <= 1e-3, "uniform n=" + std::to_string(n) + " centre err " + num(worst, 3));
    led.expect(std::abs(q.value - target) <= 0.01 * target,
               "q1=" + num(q.value, 6) + " vs " + num(target, 6));
  }
  LloydOptions o;
  o.pool_size = Index{1} << 22;
  o.restarts = 2;
  const auto c = sorted_points(lloyd(StdNormal{1}, 2, 2.0, o, {3, 0}).codebook);
  const double half_normal_mean = std::sqrt(2.0 / kPi);
  const double err = std::max(std::abs(c[0] + half_normal_mean), std::abs(c[1] - half_normal_mean));
  led.expect(err <= 5e-3, "normal n=2 centres " + num(c[0], 6) + "," + num(c[1], 6));
  return led.done();
}

Outcome voronoi_exactness() {
  Ledger led;
  Codebook cb = make_scalar_codebook({0.25, 0.75}, 2.0, "uniform_cube:1");
  cb.weights = Eigen::Vector2d(0.5, 0.5);
  const Functional f{"x^2/2", [](const Eigen::Ref<const Eigen::VectorXd>& x) { return 0.5 * x[0] * x[0]; }};
  const double est = voronoi_quadrature(cb, f).estimate;
  // (1/2)(1/32) + (1/2)(9/32) = 5/32, integral of x^2/2 = 1/6.
  led.expect(std::abs(est - 5.0 / 32.0) <= 1e-12, "estimate " + num(est, 17));
  led.expect(std::abs((1.0 / 6.0 - est) - 1.0 / 96.0) <= 1e-12, "error " + num(1.0 / 6.0 - est, 17));
  return led.done();
}

Outcome error_bound() {
  Ledger led;
  for (Index d : {1, 2}) {
    for (Index n : {4, 16, 64}) {
      const MeasureSpec m = UniformCube{d};
      const Codebook cb = midpoint_lattice_codebook(d, n);
      const Functional f = dist_to_codebook(cb);
      const SeedSpec base{31, static_cast<std::uint64_t>(100 * d + n)};
      // The midpoint lattice in one dimension has E dist = 1/(4n) exactly.
      Estimate ref{1.0 / (4.0 * n), 0.0, 0};
      if (d > 1) ref = reference_value(f, m, 4000000, base.child(1));
      const DistortionEstimate q = distortion(cb, m, 2.0, 1000000, base.child(2));
      const Index reps = 10000;
      RunningStats sq;
      for (Index r = 0; r < reps; ++r) {
        const double e = vr_mc(cb, m, f, n, base.child(3).child(static_cast<std::uint64_t>(r))).estimate - ref.value;
        sq.add(e * e);
      }
      const double rmse = std::sqrt(sq.mean());
      const double root_n = std::sqrt(static_cast<double>(n));
      const double bound = 2.0 / root_n * q.value;
      const double se = std::sqrt(std::pow(sq.stderr_mean() / (2.0 * rmse), 2) +
                                  std::pow(2.0 / root_n * q.std_error, 2) + ref.std_error * ref.std_error);
      led.expect(rmse <= bound + 3.0 * se, "d=" + std::to_string(d) + " n=" + std::to_string(n) +
                                               " rmse " + num(rmse, 3) + " <= " + num(bound, 3));
    }
  }
  return led.done();
}

RateConfig vrmc_rate_config(Index d) {
  RateConfig cfg;
  cfg.name = "vrmc-d" + std::to_string(d);
  cfg.algorithm = "vrmc";
  cfg.measure = UniformCube{d};
  cfg.measure_text = "uniform_cube:" + std::to_string(d);
  cfg.functional = functionals::abs_deviation(Space::euclidean(d), 1.0 / 3.0);
  cfg.functional_text = "abs_dev(1/3)";
  for (int j = 2; j <= 10; ++j) cfg.ladder.push_back(std::ldexp(1.0, j));
  cfg.replications = 200;
  cfg.codebook = "lattice";
  // Mean of |x_i - 1/3| over [0,1]: (1/9 + 4/9) / 2.
  cfg.exact_reference = 5.0 / 18.0;
  const double target = d == 1 ? -1.5 : -1.0;
  cfg.slope_lo = target - 0.15;
  cfg.slope_hi = target + 0.15;
  cfg.seed = {41, static_cast<std::uint64_t>(d)};
  return cfg;
}

Outcome vrmc_rate() {
  Ledger led;
  for (Index d : {1, 2}) {
    const RateReport rep = run_rate_experiment(vrmc_rate_config(d));
    led.expect(rep.passed, "d=" + std::to_string(d) + " slope " + num(rep.fit.slope) + " (r2 " +
                               num(rep.fit.r_squared, 3) + ")");
  }
  return led.done();
}

Outcome gap_identity() {
  Ledger led;
  // Exact sides for {1/4, 3/4} on [0,1] by composite Simpson on the
  // library's functionals, split at the kinks.
  const Codebook two = make_scalar_codebook({0.25, 0.75});
  const Codebook head = make_scalar_codebook({0.25});
  const FoolingFamily fam = fooling_family(two);
  auto integrate = [](auto&& g) {
    double acc = 0.0;
    const double knots[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i < 4; ++i) acc += simpson(g, knots[i], knots[i + 1], 64);
    return acc;
  };
  auto at = [](double x) { return Eigen::VectorXd::Constant(1, x); };
  const double lhs = integrate([&](double x) { return fam.functionals[1](at(x)); });
  const double q_head = integrate([&](double x) { return nearest(head, at(x)).distance; });
  const double q_two = integrate([&](double x) { return nearest(two, at(x)).distance; });
  const double rhs = 0.5 * (q_head - q_two);
  led.expect(std::abs(lhs - 3.0 / 32.0) <= 1e-14 && std::abs(rhs - 3.0 / 32.0) <= 1e-14,
             "exact " + num(lhs, 17) + " = " + num(rhs, 17));
  const GapReport mc = gap_identity_check(two, UniformCube{1}, 1000000, {51, 0});
  led.expect(mc.passed, "two-point mc diff " + num(mc.difference, 3));
  int passed_u = 0, passed_g = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (int which = 0; which < 2; ++which) {
      const MeasureSpec m = which == 0 ? MeasureSpec{UniformCube{1}} : MeasureSpec{StdNormal{1}};
      Codebook cb;
      cb.space = Space::euclidean(1);
      cb.points = sample(m, {52, s * 2 + which}, static_cast<Index>(2 + s % 7)).data;
      const GapReport rep = gap_identity_check(cb, m, 200000, {53, s * 2 + which});
      (which == 0 ? passed_u : passed_g) += rep.passed;
      if (!rep.passed) {
        led.expect(false, "codebook " + std::to_string(s) + " diff " + num(rep.difference, 3) + " se " +
                              num(rep.combined_se, 3));
      }
    }
  }
  led.expect(passed_u == 20 && passed_g == 20,
             "random codebooks " + std::to_string(passed_u) + "/20 uniform, " + std::to_string(passed_g) +
                 "/20 normal");
  return led.done();
}

Outcome event_band() {
  Ledger led;
  for (Index ell : {1, 2, 4}) {
    const EventReport rep = event_probability(ell, 1.0, 100000, {61, static_cast<std::uint64_t>(ell)},
                                              Grid::uniform(257));
    const double p = 0.5 - (phi_cdf(1.0 / static_cast<double>(ell)) - 0.5);
    const double analytic = std::pow(p, static_cast<double>(ell));
    const double cap = std::pow(2.0, -static_cast<double>(ell));
    led.expect(std::abs(rep.analytic - analytic) <= 1e-15, "analytic l=" + std::to_string(ell));
    led.expect(std::abs(rep.estimate - analytic) <= 3.0 * rep.std_error,
               "l=" + std::to_string(ell) + " P=" + num(rep.estimate) + " vs " + num(analytic));
    led.expect(rep.estimate <= cap, "cap 2^-" + std::to_string(ell));
  }
  return led.done();
}

Outcome euler_bias() {
  Ledger led;
  const DiffusionSpec gbm = DiffusionSpec::gbm(0.1, 0.2, 1.0);
  const Functional end = functionals::coord_at(Space::paths(default_grid()), 1.0);
  const double truth = std::exp(0.1);
  double prev_exact_bias = 1e9;
  std::vector<double> bias, se;
  for (Index k : {6, 11, 21, 41}) {
    const QuadratureResult r = euler_mc(gbm, end, k, 100000, {71, static_cast<std::uint64_t>(k)});
    const double exact = std::pow(1.0 + 0.1 / static_cast<double>(k - 1), static_cast<double>(k - 1));
    led.expect(std::abs(r.estimate - exact) <= 3.0 * r.std_error,
               "k=" + std::to_string(k) + " mean " + num(r.estimate, 7) + " vs " + num(exact, 7));
    const double exact_bias = std::abs(truth - exact);
    led.expect(exact_bias < prev_exact_bias, "bias " + num(exact_bias, 3));
    prev_exact_bias = exact_bias;
    bias.push_back(std::abs(truth - r.estimate));
    se.push_back(r.std_error);
  }
  // Measured biases sit below the Monte Carlo resolution at this n; require
  // that no step up in |bias| is statistically significant.
  for (std::size_t i = 1; i < bias.size(); ++i) {
    led.expect(bias[i] - bias[i - 1] <= 3.0 * std::hypot(se[i], se[i - 1]), "measured bias trend " + std::to_string(i));
  }
  return led.done();
}

Outcome t8_end_to_end() {
  Ledger led;
  RateConfig cfg;
  cfg.name = "euler-t8";
  cfg.algorithm = "euler";
  cfg.measure = Diffusion{DiffusionSpec::gbm(0.1, 0.2, 1.0), 2, default_grid()};
  cfg.functional = functionals::sup_norm(Space::paths(default_grid()));
  cfg.ladder = {1e2, 1e3, 1e4, 1e5};
  cfg.replications = 100;
  cfg.reference_budget = 100000;
  cfg.slope_lo = -0.35;
  cfg.slope_hi = -0.15;
  cfg.require_decreasing = true;
  cfg.seed = {81, 0};
  const RateReport rep = run_rate_experiment(cfg);
  std::string rmse;
  for (const auto& r : rep.rows) rmse += (rmse.empty() ? "" : ",") + num(r.point.error, 3);
  led.expect(rep.decreasing_ok, "rmse " + rmse);
  led.expect(rep.slope_ok, "slope " + num(rep.fit.slope));
  return led.done();
}

Outcome width_rate() {
  Ledger led;
  const GridPtr grid = Grid::uniform(1025);
  const MeasureSpec bm = brownian_on_grid(grid);
  std::vector<RatePoint> pts;
  int matched = 0;
  for (Index k = 1; k <= 16; ++k) {
    const RatePoint p = width_estimate(bm, make_kl_subspace(k, grid), 2.0, 10000, {91, static_cast<std::uint64_t>(k)});
    pts.push_back(p);
    // Oracle: tail of the eigenvalue series by direct summation.
    long double tail = 0.5L;
    for (Index l = 1; l <= k; ++l) tail -= 1.0L / ((l - 0.5L) * (l - 0.5L) * static_cast<long double>(kPi * kPi));
    const double oracle = std::sqrt(static_cast<double>(tail));
    led.expect(std::abs(kl_tail_width(k) - oracle) <= 1e-10, "tail k=" + std::to_string(k));
    const bool ok = std::abs(p.error - oracle) <= 3.0 * p.std_error;
    matched += ok;
    if (!ok) led.expect(false, "k=" + std::to_string(k) + " width " + num(p.error) + " vs " + num(oracle));
  }
  const RateFit fit = rate_fit(pts, RateTransform::LogLog);
  led.expect(matched == 16, std::to_string(matched) + "/16 within 3 stderr");
  led.expect(std::abs(fit.slope + 0.5) <= 0.1, "slope " + num(fit.slope));
  return led.done();
}

Outcome quantization_rate() {
  Ledger led;
  RateConfig cfg;
  cfg.name = "pq";
  cfg.algorithm = "pq";
  cfg.measure = brownian_on_grid(default_grid());
  for (int j = 4; j <= 14; ++j) cfg.ladder.push_back(std::ldexp(1.0, j));
  cfg.distortion_samples = 4000;
  cfg.order = 2.0;
  cfg.transform = RateTransform::LogLogInLog;
  cfg.slope_lo = -0.75;
  cfg.slope_hi = -0.25;
  cfg.seed = {101, 0};
  const RateReport rep = run_rate_experiment(cfg);
  led.expect(rep.passed, "slope " + num(rep.fit.slope) + " vs ln ln n, q(" +
                             num(rep.rows.front().point.size, 5) + ")=" + num(rep.rows.front().point.error) +
                             " q(" + num(rep.rows.back().point.size, 5) + ")=" + num(rep.rows.back().point.error));
  return led.done();
}

Outcome subspace_blindness() {
  Ledger led;
  for (Index k : {1, 4, 16}) {
    const Subspace sub = make_kl_subspace(k);
    const Functional f0 = subspace_blind_functional(sub);
    const QuadratureResult g = gaussian_subspace_mc(sub, f0, 10000, {111, static_cast<std::uint64_t>(k)});
    led.expect(g.estimate == 0.0 && g.std_error == 0.0, "k=" + std::to_string(k) + " subspace mc " + num(g.estimate));
    const Estimate ref = reference_value(f0, brownian_on_grid(default_grid()), 10000, {112, static_cast<std::uint64_t>(k)});
    led.expect(ref.value > 5.0 * ref.std_error, "reference " + num(ref.value) + " (" +
                                                   num(ref.value / ref.std_error, 3) + " stderr)");
  }
  return led.done();
}

Outcome property_suites() {
  Ledger led;
  // Fooling families on points and paths: Lipschitz, disjoint supports,
  // signed combinations.
  struct Case {
    MeasureSpec measure;
    Index n;
  };
  const std::vector<Case> cases = {{UniformCube{1}, 6}, {StdNormal{1}, 5}, {UniformCube{2}, 9},
                                   {BrownianKL{50, Grid::uniform(65)}, 6}};
  std::uint64_t tag = 0;
  for (const auto& c : cases) {
    Codebook cb;
    cb.space = space_of(c.measure);
    cb.points = sample(c.measure, {121, tag++}, c.n).data;
    cb.norm = natural_norm(cb.space);
    const FoolingFamily fam = fooling_family(cb);
    bool lip_ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < fam.functionals.size(); ++i) {
      const LipschitzReport rep = lipschitz_check(fam.functionals[i], c.measure, 10000, {122, tag * 100 + i});
      lip_ok = lip_ok && !rep.flagged;
      worst = std::max(worst, rep.max_ratio);
    }
    led.expect(lip_ok, cb.space.describe() + " fooling ratio " + num(worst, 6));
    const Index overlap = max_support_overlap(fam, sample(c.measure, {123, tag}, 10000).data);
    led.expect(overlap <= 1, "overlap " + std::to_string(overlap));
    RandomStream rs({124, tag}, 0);
    bool signed_ok = true;
    for (int t = 0; t < 10; ++t) {
      std::vector<int> signs;
      for (Index i = 0; i < fam.size(); ++i) signs.push_back(rs.uniform() < 0.5 ? -1 : 1);
      signed_ok = signed_ok && !lipschitz_check(signed_combination(fam, signs), c.measure, 2000,
                                                {125, tag * 100 + static_cast<std::uint64_t>(t)})
                                   .flagged;
    }
    led.expect(signed_ok, "signed combinations");
  }

  // Lloyd distortion never increases per iteration.
  bool mono = true;
  auto monotone = [](const std::vector<double>& h) {
    for (std::size_t i = 1; i < h.size(); ++i) {
      if (h[i] > h[i - 1]) return false;
    }
    return true;
  };
  LloydOptions o;
  o.pool_size = 20000;
  o.restarts = 3;
  for (double r : {1.0, 2.0}) {
    for (bool fast : {true, false}) {
      o.fast_1d = fast;
      mono = mono && monotone(lloyd(StdNormal{1}, 7, r, o, {126, fast}).history);
    }
    mono = mono && monotone(lloyd(UniformCube{2}, 10, r, o, {127, 0}).history);
  }
  o.pool_size = 5000;
  mono = mono && monotone(lloyd(BrownianKL{20, Grid::uniform(65)}, 6, 2.0, o, {128, 0}).history);
  led.expect(mono, "lloyd monotone");

  // Bit reproducibility across repeated runs and worker counts.
  auto fingerprint = [] {
    std::string s;
    const SampleSet bm = sample(BrownianKL{30, Grid::uniform(33)}, {131, 0}, 3000);
    s += format_double(bm.data.sum()) + format_double(bm.data(5, 2999));
    LloydOptions lo;
    lo.pool_size = 4000;
    s += format_codebook(lloyd(StdNormal{2}, 4, 2.0, lo, {132, 0}).codebook);
    Codebook cb = midpoint_lattice_codebook(1, 8);
    s += format_double(vr_mc(cb, UniformCube{1}, functionals::abs_deviation(Space::euclidean(1), 0.3), 5000,
                             {133, 0}).estimate);
    s += format_double(event_probability(2, 1.0, 10000, {134, 0}).estimate);
    RateConfig cfg = vrmc_rate_config(1);
    cfg.ladder = {4, 8, 16, 32};
    cfg.replications = 20;
    s += rate_table_csv(run_rate_experiment(cfg));
    std::ostringstream out, err;
    const char* argv[] = {"quantquad", "--seed", "9", "quad", "--algo", "gauss-sub", "--measure", "brownian_kl:50",
                          "--functional", "sup_norm", "--n", "500", "--k", "20"};
    run_cli(14, argv, out, err);
    s += out.str();
    return s;
  };
  set_default_workers(1);
  const std::string a = fingerprint();
  set_default_workers(4);
  const std::string b = fingerprint();
  set_default_workers(0);
  const std::string c = fingerprint();
  led.expect(a == b && b == c, "bit-reproducible across runs and 1/4 workers");
  return led.done();
}

struct Check {
  int id;
  const char* name;
  Outcome (*run)();
};

const Check kChecks[] = {
    {1, "scalar-quantizers", scalar_quantizers},   {2, "voronoi-exactness", voronoi_exactness},
    {3, "vrmc-error-bound", error_bound},           {4, "vrmc-rate", vrmc_rate},
    {5, "gap-identity", gap_identity},             {6, "increment-events", event_band},
    {7, "euler-bias", euler_bias},                 {8, "euler-budget-schedule", t8_end_to_end},
    {9, "kl-width-rate", width_rate},              {10, "product-quantizer-rate", quantization_rate},
    {11, "subspace-blindness", subspace_blindness}, {12, "property-suites", property_suites},
};

}  // namespace
}  // namespace quantquad

int main(int argc, char** argv) {
  using namespace quantquad;
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& check : kChecks) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), check.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = check.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !out.pass;
    std::printf("%s %2d %-24s %6.1fs  %s\n", out.pass ? "PASS" : "FAIL", check.id, check.name, secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
