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

#include "quantquad/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quantquad/adversary.hpp"
#include "quantquad/experiments.hpp"
#include "quantquad/io.hpp"
#include "quantquad/parallel.hpp"
#include "quantquad/quadrature.hpp"
#include "quantquad/quantize.hpp"

namespace quantquad {
namespace {

using nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string out;
  bool seed_given = false;
  std::string command;
};

struct QuantizeOpts {
  std::string measure;
  Index n = 0;
  double r = 2.0;
  Index iters = 200;
  Index restarts = 8;
  Index pool = 0;
  std::string norm;
  Index weight_samples = 100000;
};

struct QuadOpts {
  std::string algo;
  std::string measure;
  std::string functional;
  std::optional<double> budget;
  std::optional<Index> n;
  std::optional<Index> k;
  std::string codebook;
  double alpha = 2.0;
  double beta = 0.0;
};

struct AdversaryOpts {
  std::string check;
  std::string codebook;
  std::string measure;
  std::string functional;
  Index samples = 100000;
  Index pairs = 1000;
  Index ell = 1;
  double eps = 1.0;
  Index grid = 257;
  Index n = 1;
};

struct WidthOpts {
  std::string measure = "brownian:257";
  std::string ks = "1,2,4,8,16";
  double p = 2.0;
  Index samples = 10000;
  std::string norm = "l2";
};

std::string quote(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t\"'") == std::string::npos) return s;
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

std::string join_command(int argc, const char* const* argv) {
  std::string cmd = "quantquad";
  for (int i = 1; i < argc; ++i) cmd += " " + quote(argv[i]);
  return cmd;
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  std::istringstream is(text);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    const double v = parse_double_strict(cell, "list");
    if (v != std::floor(v)) throw ConfigError("list entries must be integers");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

// Writes to --out when given, else to the text stream.
void emit(const Globals& g, std::ostream& out, const std::string& content) {
  if (g.out.empty()) {
    out << content;
  } else {
    write_file_atomic(g.out, content);
    out << "wrote " << g.out << "\n";
  }
}

std::vector<std::string> echo_lines(const Globals& g) {
  return {"seed=" + std::to_string(g.seed), "command=" + g.command};
}

// ----------------------------------------------------------------- quantize

int run_quantize(const Globals& g, const QuantizeOpts& o, std::ostream& out) {
  const MeasureSpec measure = parse_measure(o.measure);
  std::optional<NormKind> norm;
  if (!o.norm.empty()) norm = parse_norm_kind(o.norm);
  if (o.n < 1) throw ConfigError("quantize: --n must be >= 1");
  if (o.weight_samples != 0 && o.weight_samples < 100) {
    throw ConfigError("quantize: --weights must be 0 or >= 100");
  }
  LloydOptions opts;
  opts.iters = o.iters;
  opts.restarts = o.restarts;
  opts.pool_size = o.pool > 0 ? o.pool : (space_of(measure).is_path() ? 20000 : 100000);
  const SeedSpec seed{g.seed, 0};

  LloydResult res = lloyd(measure, o.n, o.r, opts, seed, norm);
  std::vector<std::string> comments = echo_lines(g);
  comments.push_back("measure=" + describe(measure));
  comments.push_back("n=" + std::to_string(o.n) + " r=" + format_double(o.r) +
                     " norm=" + to_string(res.codebook.norm) + " iters=" + std::to_string(opts.iters) +
                     " restarts=" + std::to_string(opts.restarts) + " pool=" + std::to_string(opts.pool_size));
  comments.push_back("lloyd_restart=" + std::to_string(res.restart) +
                     " iterations=" + std::to_string(res.history.size() - 1) +
                     " pool_distortion_r=" + format_double(res.history.back()) +
                     " reseeded=" + std::to_string(res.reseeded_cells));
  if (o.weight_samples > 0) {
    const WeightReport w = voronoi_weights(res.codebook, measure, o.weight_samples, seed.child(9));
    const DistortionEstimate d = distortion(res.codebook, measure, o.r, o.weight_samples, seed.child(10));
    comments.push_back("weights_samples=" + std::to_string(o.weight_samples) +
                       " empty_cells=" + std::to_string(w.empty_cells.size()));
    comments.push_back("distortion=" + format_double(d.value) + " stderr=" + format_double(d.std_error));
  }
  emit(g, out, format_codebook(res.codebook, comments));
  return kExitOk;
}

// --------------------------------------------------------------------- quad

int run_quad(const Globals& g, const QuadOpts& o, std::ostream& out) {
  static const std::vector<std::string> algos = {"voronoi", "mc", "vrmc", "euler", "gauss-sub"};
  if (std::find(algos.begin(), algos.end(), o.algo) == algos.end()) {
    throw ConfigError("quad: --algo must be one of voronoi, mc, vrmc, euler, gauss-sub");
  }
  const bool needs_codebook = o.algo == "voronoi" || o.algo == "vrmc";
  if (needs_codebook && o.codebook.empty()) throw ConfigError("quad: --algo " + o.algo + " needs --codebook");
  if (!needs_codebook && !o.codebook.empty()) throw ConfigError("quad: --codebook only applies to voronoi and vrmc");
  if (o.algo != "voronoi" && o.measure.empty()) throw ConfigError("quad: --measure is required");
  if (o.budget && (o.n || o.k)) throw ConfigError("quad: give either --budget or --n/--k, not both");
  if (o.algo == "voronoi" && (o.budget || o.n || o.k)) {
    throw ConfigError("quad: voronoi takes its size from the codebook");
  }
  if ((o.algo == "mc" || o.algo == "vrmc") && o.k) throw ConfigError("quad: --k only applies to euler and gauss-sub");

  std::optional<Codebook> cb;
  if (needs_codebook) cb = load_codebook(o.codebook);
  std::optional<MeasureSpec> measure;
  if (!o.measure.empty()) measure = parse_measure(o.measure);
  const Space space = measure ? space_of(*measure) : cb->space;
  const Functional f = parse_functional(o.functional, space);
  const SeedSpec seed{g.seed, 0};

  Schedule plan;
  if (o.algo == "euler" || o.algo == "gauss-sub") {
    if (o.budget) {
      plan = o.algo == "euler" ? t8_schedule(*o.budget) : galg_schedule(*o.budget, {o.alpha, o.beta});
    } else {
      if (!o.n || !o.k) throw ConfigError("quad: --algo " + o.algo + " needs --budget or both --n and --k");
      plan = {*o.n, *o.k};
    }
  } else if (o.algo == "mc" || o.algo == "vrmc") {
    if (o.budget) {
      const Index dim = subspace_dim(*measure);
      const double per = static_cast<double>(o.algo == "vrmc" ? std::max(dim, cb->cost_dim()) : dim);
      const double calls = std::floor(*o.budget / per) - (o.algo == "vrmc" ? static_cast<double>(cb->size()) : 0.0);
      plan.n = static_cast<Index>(std::max(0.0, calls));
    } else if (o.n) {
      plan.n = *o.n;
    } else {
      throw ConfigError("quad: --algo " + o.algo + " needs --n or --budget");
    }
  }

  QuadratureResult r;
  if (o.algo == "voronoi") {
    r = voronoi_quadrature(*cb, f);
  } else if (o.algo == "mc") {
    r = classical_mc(*measure, f, plan.n, seed);
  } else if (o.algo == "vrmc") {
    r = vr_mc(*cb, *measure, f, plan.n, seed);
  } else if (o.algo == "euler") {
    const auto* d = std::get_if<Diffusion>(&*measure);
    if (!d) throw ConfigError("quad: euler needs a diffusion measure");
    r = euler_mc(d->spec, f, plan.k, plan.n, seed, d->grid);
  } else {
    if (!space.is_path() || space.dim != 1) throw ConfigError("quad: gauss-sub needs a Brownian path measure");
    r = gaussian_subspace_mc(make_kl_subspace(plan.k, space.grid), f, plan.n, seed);
  }

  ordered_json cfg;
  cfg["algo"] = o.algo;
  if (measure) cfg["measure"] = describe(*measure);
  cfg["functional"] = f.name;
  if (!o.codebook.empty()) cfg["codebook"] = o.codebook;
  if (o.budget) cfg["budget"] = *o.budget;
  if (o.algo == "gauss-sub") {
    cfg["alpha"] = o.alpha;
    cfg["beta"] = o.beta;
  }
  cfg["workers"] = g.workers;

  ordered_json j;
  j["estimate"] = r.estimate;
  j["stderr"] = r.std_error;
  j["n"] = o.algo == "voronoi" ? r.cardinality : plan.n;
  j["k"] = r.subspace_dim;
  j["cardinality"] = r.cardinality;
  j["oracle_calls"] = r.cost.oracle_calls;
  j["oracle_cost"] = r.cost.oracle_cost;
  j["rng_calls"] = r.cost.rng_calls;
  j["arithmetic_proxy"] = r.cost.arithmetic_proxy;
  j["seed"] = g.seed;
  j["config"] = cfg;
  j["command"] = g.command;
  emit(g, out, j.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- adversary

std::string bool_text(bool b) { return b ? "true" : "false"; }

int run_adversary(const Globals& g, const AdversaryOpts& o, std::ostream& out) {
  static const std::vector<std::string> checks = {"gap-identity", "lipschitz", "events", "bakhvalov"};
  if (std::find(checks.begin(), checks.end(), o.check) == checks.end()) {
    throw ConfigError("adversary: --check must be one of gap-identity, lipschitz, events, bakhvalov");
  }
  const SeedSpec seed{g.seed, 0};
  std::ostringstream os;
  os.precision(17);
  for (const auto& line : echo_lines(g)) os << "# " << line << "\n";
  bool pass = true;

  if (o.check == "events") {
    const EventReport e = event_probability(o.ell, o.eps, o.samples, seed, Grid::uniform(o.grid));
    const bool match = std::abs(e.estimate - e.analytic) <= 3.0 * e.std_error;
    const bool capped = e.estimate <= e.cap + 3.0 * e.std_error;
    pass = match && capped;
    os << "check=events ell=" << o.ell << " eps=" << o.eps << " grid=" << o.grid << " samples=" << o.samples
       << " estimate=" << e.estimate << " stderr=" << e.std_error << " analytic=" << e.analytic
       << " cap=" << e.cap << " threshold=" << e.threshold << " match=" << bool_text(match)
       << " capped=" << bool_text(capped) << " pass=" << bool_text(pass) << "\n";
  } else {
    if (o.measure.empty()) throw ConfigError("adversary: --check " + o.check + " needs --measure");
    const MeasureSpec measure = parse_measure(o.measure);
    if (o.check == "lipschitz") {
      std::vector<Functional> fs;
      if (!o.functional.empty()) {
        fs.push_back(parse_functional(o.functional, space_of(measure)));
      } else if (!o.codebook.empty()) {
        fs = fooling_family(load_codebook(o.codebook)).functionals;
      } else {
        throw ConfigError("adversary: lipschitz needs --functional or --codebook");
      }
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const LipschitzReport r = lipschitz_check(fs[i], measure, o.pairs, seed.child(i));
        pass = pass && !r.flagged;
        os << "check=lipschitz functional=" << fs[i].name << " pairs=" << r.pairs_checked
           << " skipped=" << r.pairs_skipped << " max_ratio=" << r.max_ratio << " claim=" << r.claim
           << " pass=" << bool_text(!r.flagged) << "\n";
      }
    } else {
      if (o.codebook.empty()) throw ConfigError("adversary: --check " + o.check + " needs --codebook");
      const Codebook cb = load_codebook(o.codebook);
      if (o.check == "gap-identity") {
        const GapReport r = gap_identity_check(cb, measure, o.samples, seed);
        pass = r.passed;
        os << "check=gap-identity m=" << cb.size() << " samples=" << o.samples << " lhs=" << r.lhs
           << " lhs_stderr=" << r.lhs_se << " rhs=" << r.rhs << " rhs_stderr=" << r.rhs_se
           << " difference=" << r.difference << " combined_stderr=" << r.combined_se
           << " pass=" << bool_text(pass) << "\n";
      } else {
        const FoolingFamily fam = fooling_family(cb);
        std::vector<Estimate> means;
        for (const auto& f : fam.functionals) means.push_back(reference_value(f, measure, o.samples, seed));
        const double bound = bakhvalov_lower_bound(o.n, means);
        pass = bound > 0.0;
        for (std::size_t i = 0; i < means.size(); ++i) {
          os << "member=" << i << " mean=" << means[i].value << " stderr=" << means[i].std_error << "\n";
        }
        os << "check=bakhvalov n=" << o.n << " m=" << fam.size() << " bound=" << bound
           << " pass=" << bool_text(pass) << "\n";
      }
    }
  }
  emit(g, out, os.str());
  return pass ? kExitOk : kExitCheckFailed;
}

// -------------------------------------------------------------------- rates

int run_rates(const Globals& g, const std::string& config_path, std::ostream& out) {
  const ConfigMap map = parse_config(read_file(config_path));
  RateConfig cfg = parse_rate_config(map);
  if (g.seed_given || !map.count("seed")) cfg.seed.master_seed = g.seed;
  const RateReport rep = run_rate_experiment(cfg);

  std::string head;
  head += "# command=" + g.command + "\n";
  for (const auto& line : describe_rate_config(cfg)) head += "# " + line + "\n";
  for (const auto& line : rep.log) head += "# " + line + "\n";
  std::ostringstream fit;
  fit.precision(17);
  fit << "# fit slope=" << rep.fit.slope << " slope_stderr=" << rep.fit.slope_se
      << " r_squared=" << rep.fit.r_squared << " transform=" << to_string(rep.fit.transform)
      << " slope_ok=" << bool_text(rep.slope_ok) << " decreasing_ok=" << bool_text(rep.decreasing_ok)
      << " pass=" << bool_text(rep.passed) << "\n";
  head += fit.str();

  if (!g.out.empty()) write_file_atomic(g.out + ".plot.csv", head + rate_plot_csv(rep));
  emit(g, out, head + rate_table_csv(rep));
  return rep.passed ? kExitOk : kExitCheckFailed;
}

// ------------------------------------------------------------------- widths

int run_widths(const Globals& g, const WidthOpts& o, std::ostream& out) {
  const MeasureSpec measure = parse_measure(o.measure);
  const NormKind norm = parse_norm_kind(o.norm);
  const auto ks = parse_index_list(o.ks);
  const Space space = space_of(measure);
  if (!space.is_path() || space.dim != 1) throw ConfigError("widths: needs a one-channel path measure");
  if (ks.empty()) throw ConfigError("widths: --k needs at least one entry");
  const SeedSpec seed{g.seed, 0};

  std::ostringstream os;
  os.precision(17);
  for (const auto& line : echo_lines(g)) os << "# " << line << "\n";
  os << "# measure=" << describe(measure) << " p=" << o.p << " samples=" << o.samples
     << " norm=" << to_string(norm) << "\n";
  std::vector<RatePoint> pts;
  std::ostringstream rows;
  rows.precision(17);
  rows << "k,width,stderr,kl_tail_width\n";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const RatePoint p = width_estimate(measure, make_kl_subspace(ks[i], space.grid), o.p, o.samples,
                                       seed.child(i), norm);
    pts.push_back(p);
    rows << ks[i] << ',' << p.error << ',' << p.std_error << ',' << kl_tail_width(ks[i]) << '\n';
  }
  if (pts.size() >= 4) {
    const RateFit fit = rate_fit(pts, RateTransform::LogLog);
    os << "# fit slope=" << fit.slope << " r_squared=" << fit.r_squared << "\n";
  }
  emit(g, out, os.str() + rows.str());
  return kExitOk;
}

int run_info(bool version, std::ostream& out) {
  out << "quantquad " << kVersion << "\n";
  if (version) return kExitOk;
  out << "subcommands: quantize quad adversary rates widths info\n"
      << "measures: uniform_cube:d std_normal:d brownian_kl:k[:G] brownian:G kind=diffusion ...\n"
      << "functionals: coord_at(t) abs_coord_at(t) sup_norm sup_value l1_integral coord(i) abs_dev(c) "
         "dist_to_codebook(file)\n"
      << "algorithms: voronoi mc vrmc euler gauss-sub\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quadrature of Lipschitz functionals by quantization and Monte Carlo", "quantquad"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  g.command = join_command(argc, argv);
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed; every random stream derives from it");
  app.add_option("--workers", g.workers, "Worker threads (0 = hardware concurrency)");
  app.add_option("--out", g.out, "Output file (written atomically)");

  QuantizeOpts qz;
  auto* quantize = app.add_subcommand("quantize", "Lloyd codebook on a sample pool");
  quantize->add_option("--measure", qz.measure, "Measure, e.g. uniform_cube:1")->required();
  quantize->add_option("--n", qz.n, "Codebook size")->required();
  quantize->add_option("--r", qz.r, "Quantization order (1 or 2)");
  quantize->add_option("--iters", qz.iters, "Lloyd iterations");
  quantize->add_option("--restarts", qz.restarts, "Random restarts");
  quantize->add_option("--pool", qz.pool, "Pool size (0 = 1e5 points, 2e4 paths)");
  quantize->add_option("--norm", qz.norm, "sup, l1, l2 or euclidean");
  quantize->add_option("--weights", qz.weight_samples, "Samples for Voronoi weights (0 = none)");

  QuadOpts qd;
  auto* quad = app.add_subcommand("quad", "Run one quadrature algorithm");
  quad->add_option("--algo", qd.algo, "voronoi, mc, vrmc, euler or gauss-sub")->required();
  quad->add_option("--measure", qd.measure, "Measure");
  quad->add_option("--functional", qd.functional, "Functional, e.g. coord_at(1)")->required();
  quad->add_option("--budget", qd.budget, "Cost budget N");
  quad->add_option("--n", qd.n, "Number of functional evaluations");
  quad->add_option("--k", qd.k, "Subspace dimension / Euler breakpoints");
  quad->add_option("--codebook", qd.codebook, "Codebook file");
  quad->add_option("--alpha", qd.alpha, "Small-ball exponent alpha");
  quad->add_option("--beta", qd.beta, "Small-ball log exponent beta");

  AdversaryOpts ad;
  auto* adversary = app.add_subcommand("adversary", "Lower-bound constructions and property checks");
  adversary->add_option("--check", ad.check, "gap-identity, lipschitz, events or bakhvalov")->required();
  adversary->add_option("--codebook", ad.codebook, "Codebook file");
  adversary->add_option("--measure", ad.measure, "Measure");
  adversary->add_option("--functional", ad.functional, "Functional for the Lipschitz check");
  adversary->add_option("--samples", ad.samples, "Monte Carlo samples");
  adversary->add_option("--pairs", ad.pairs, "Pairs for the Lipschitz check");
  adversary->add_option("--ell", ad.ell, "Number of increments");
  adversary->add_option("--eps", ad.eps, "Grid scale eps");
  adversary->add_option("--grid", ad.grid, "Grid size for Brownian samples");
  adversary->add_option("--n", ad.n, "Cardinality n for the Bakhvalov bound");

  std::string rates_config;
  auto* rates = app.add_subcommand("rates", "Rate experiment from a config file");
  rates->add_option("--config", rates_config, "key=value config file")->required();

  WidthOpts wd;
  auto* widths = app.add_subcommand("widths", "KL widths of Brownian motion");
  widths->add_option("--measure", wd.measure, "Path measure");
  widths->add_option("--k", wd.ks, "Comma list of subspace dimensions");
  widths->add_option("--p", wd.p, "Moment p");
  widths->add_option("--samples", wd.samples, "Monte Carlo samples");
  widths->add_option("--norm", wd.norm, "Residual norm");

  bool version = false;
  auto* info = app.add_subcommand("info", "Version and built-in names");
  info->add_flag("--version", version, "Print the version line only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  g.seed_given = seed_opt->count() > 0;
  if (g.workers > 0) set_default_workers(g.workers);

  try {
    if (*quantize) return run_quantize(g, qz, out);
    if (*quad) return run_quad(g, qd, out);
    if (*adversary) return run_adversary(g, ad, out);
    if (*rates) return run_rates(g, rates_config, out);
    if (*widths) return run_widths(g, wd, out);
    if (*info) return run_info(version, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace quantquad
