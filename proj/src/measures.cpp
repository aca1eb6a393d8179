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

#include "quantquad/measures.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "quantquad/parallel.hpp"
#include "quantquad/subspace.hpp"

namespace quantquad {
namespace {

constexpr Index kChunk = 1024;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number '" + s + "' in " + context);
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Fills one Euler path into `out` (G x m, column-major). Returns draws used.
std::uint64_t euler_fill(const DiffusionSpec& spec, Index k, const Grid& grid, RandomStream& rs,
                         double* out) {
  const Index g = grid.size();
  const Index m = spec.dim;
  const double steps = static_cast<double>(k - 1);
  const double h = 1.0 / steps;
  const double sqrt_h = 1.0 / std::sqrt(steps);
  const Eigen::VectorXd& t = grid.points();

  if (m == 1 && spec.families) {
    const Coefficient a = spec.families->first;
    const Coefficient b = spec.families->second;
    double x = spec.u0[0];
    out[0] = x;
    Index j = 1;
    for (Index l = 0; l + 1 < k; ++l) {
      const double z = rs.normal();
      const double next = x + h * a(x) + sqrt_h * b(x) * z;
      if (!std::isfinite(next)) {
        throw NumericError("euler: non-finite state at step " + std::to_string(l + 1),
                           static_cast<std::size_t>(l + 1));
      }
      const double tau0 = static_cast<double>(l) / steps;
      const double tau1 = static_cast<double>(l + 1) / steps;
      for (; j < g && t[j] <= tau1; ++j) {
        const double w = (t[j] - tau0) * steps;
        out[j] = w >= 1.0 ? next : x + w * (next - x);
      }
      x = next;
    }
    return static_cast<std::uint64_t>(k - 1);
  }

  Eigen::VectorXd x = spec.u0;
  Eigen::VectorXd next(m), drift(m), z(m);
  Eigen::MatrixXd diff(m, m);
  Eigen::Map<Eigen::MatrixXd> values(out, g, m);
  values.row(0) = x.transpose();
  Index j = 1;
  for (Index l = 0; l + 1 < k; ++l) {
    for (Index c = 0; c < m; ++c) z[c] = rs.normal();
    spec.drift(x, drift);
    spec.diffusion(x, diff);
    next.noalias() = x + h * drift;
    next.noalias() += sqrt_h * (diff * z);
    if (!next.allFinite()) {
      throw NumericError("euler: non-finite state at step " + std::to_string(l + 1),
                         static_cast<std::size_t>(l + 1));
    }
    const double tau0 = static_cast<double>(l) / steps;
    const double tau1 = static_cast<double>(l + 1) / steps;
    for (; j < g && t[j] <= tau1; ++j) {
      const double w = (t[j] - tau0) * steps;
      if (w >= 1.0) {
        values.row(j) = next.transpose();
      } else {
        values.row(j) = (x + w * (next - x)).transpose();
      }
    }
    x.swap(next);
  }
  return static_cast<std::uint64_t>((k - 1) * m);
}

Eigen::MatrixXd scaled_kl_basis(Index k_terms, const Grid& grid) {
  Eigen::MatrixXd e(grid.size(), k_terms);
  for (Index l = 1; l <= k_terms; ++l) {
    const double s = std::sqrt(kl_eigenvalue(l));
    for (Index j = 0; j < grid.size(); ++j) e(j, l - 1) = s * kl_eigenfunction(l, grid[j]);
  }
  return e;
}

}  // namespace

Coefficient Coefficient::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("coefficient '" + text + "' needs family:value");
  const std::string family = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (family == "constant") return constant(parse_double(rest, text));
  if (family == "linear") return linear(parse_double(rest, text));
  if (family == "affine") {
    const auto c2 = rest.find(':');
    if (c2 == std::string::npos) throw ConfigError("affine coefficient needs affine:c0:c1");
    return affine(parse_double(rest.substr(0, c2), text), parse_double(rest.substr(c2 + 1), text));
  }
  throw ConfigError("unknown coefficient family '" + family + "' (constant, linear, affine)");
}

std::string Coefficient::describe() const {
  switch (family) {
    case Family::Constant: return "constant:" + fmt(c0);
    case Family::Linear: return "linear:" + fmt(c0);
    case Family::Affine: return "affine:" + fmt(c0) + ":" + fmt(c1);
  }
  return "?";
}

DiffusionSpec DiffusionSpec::from_families(const Coefficient& drift, const Coefficient& diffusion,
                                           Eigen::VectorXd u0) {
  DiffusionSpec spec;
  spec.dim = u0.size();
  if (spec.dim < 1) throw ConfigError("diffusion needs an initial value of dimension >= 1");
  spec.u0 = std::move(u0);
  spec.families = std::make_pair(drift, diffusion);
  spec.drift = [drift](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) {
    for (Index c = 0; c < x.size(); ++c) out[c] = drift(x[c]);
  };
  spec.diffusion = [diffusion](const Eigen::Ref<const Eigen::VectorXd>& x,
                               Eigen::Ref<Eigen::MatrixXd> out) {
    out.setZero();
    for (Index c = 0; c < x.size(); ++c) out(c, c) = diffusion(x[c]);
  };
  return spec;
}

DiffusionSpec DiffusionSpec::gbm(double mu, double sigma, double u0) {
  return from_families(Coefficient::linear(mu), Coefficient::linear(sigma),
                       Eigen::VectorXd::Constant(1, u0));
}

std::string DiffusionSpec::describe() const {
  std::ostringstream os;
  if (families) {
    os << "drift=" << families->first.describe() << " diffusion=" << families->second.describe();
  } else {
    os << "drift=custom diffusion=custom";
  }
  os << " u0=";
  for (Index c = 0; c < u0.size(); ++c) os << (c ? "," : "") << fmt(u0[c]);
  return os.str();
}

MeasureSpec brownian_on_grid(const GridPtr& grid) {
  if (!grid->is_uniform()) throw ConfigError("brownian_on_grid needs a uniform grid");
  return Diffusion{DiffusionSpec::from_families(Coefficient::constant(0.0),
                                                Coefficient::constant(1.0),
                                                Eigen::VectorXd::Zero(1)),
                   grid->size(), grid};
}

void validate(const MeasureSpec& measure) {
  std::visit(Overloaded{
                 [](const UniformCube& m) {
                   if (m.dim < 1) throw ConfigError("uniform_cube: d must be >= 1");
                 },
                 [](const StdNormal& m) {
                   if (m.dim < 1) throw ConfigError("std_normal: d must be >= 1");
                 },
                 [](const BrownianKL& m) {
                   if (m.k_terms < 1) throw ConfigError("brownian_kl: k_terms must be >= 1");
                   if (!m.grid) throw ConfigError("brownian_kl: missing grid");
                 },
                 [](const Diffusion& m) {
                   if (m.k_steps < 2) throw ConfigError("diffusion: k_steps must be >= 2");
                   if (!m.grid) throw ConfigError("diffusion: missing grid");
                   if (m.spec.u0.size() != m.spec.dim || m.spec.dim < 1) {
                     throw ConfigError("diffusion: u0 must have dimension m >= 1");
                   }
                   if (!m.spec.u0.allFinite()) throw ConfigError("diffusion: u0 must be finite");
                   if (!m.spec.drift || !m.spec.diffusion) {
                     throw ConfigError("diffusion: drift and diffusion must be set");
                   }
                 },
             },
             measure);
}

Space space_of(const MeasureSpec& measure) {
  return std::visit(Overloaded{
                        [](const UniformCube& m) { return Space::euclidean(m.dim); },
                        [](const StdNormal& m) { return Space::euclidean(m.dim); },
                        [](const BrownianKL& m) { return Space::paths(m.grid, 1); },
                        [](const Diffusion& m) { return Space::paths(m.grid, m.spec.dim); },
                    },
                    measure);
}

Index subspace_dim(const MeasureSpec& measure) {
  return std::visit(Overloaded{
                        [](const UniformCube& m) { return m.dim; },
                        [](const StdNormal& m) { return m.dim; },
                        [](const BrownianKL& m) { return m.k_terms; },
                        [](const Diffusion& m) { return m.k_steps * m.spec.dim; },
                    },
                    measure);
}

std::string describe(const MeasureSpec& measure) {
  return std::visit(
      Overloaded{
          [](const UniformCube& m) { return "kind=uniform_cube d=" + std::to_string(m.dim); },
          [](const StdNormal& m) { return "kind=std_normal d=" + std::to_string(m.dim); },
          [](const BrownianKL& m) {
            return "kind=brownian_kl k_terms=" + std::to_string(m.k_terms) +
                   " grid=" + std::to_string(m.grid->size());
          },
          [](const Diffusion& m) {
            return "kind=diffusion " + m.spec.describe() + " k_steps=" +
                   std::to_string(m.k_steps) + " grid=" + std::to_string(m.grid->size());
          },
      },
      measure);
}

std::string measure_tag(const MeasureSpec& measure) {
  return std::visit(
      Overloaded{
          [](const UniformCube& m) { return "uniform_cube:" + std::to_string(m.dim); },
          [](const StdNormal& m) { return "std_normal:" + std::to_string(m.dim); },
          [](const BrownianKL& m) { return "brownian_kl:" + std::to_string(m.k_terms); },
          [](const Diffusion& m) { return "diffusion:" + std::to_string(m.k_steps); },
      },
      measure);
}

std::uint64_t sample_into(const MeasureSpec& measure, const SeedSpec& seed, Index first,
                          Eigen::Ref<Eigen::MatrixXd> out) {
  validate(measure);
  const Space space = space_of(measure);
  require_shape(space, out.rows(), "sample");
  const Index count = out.cols();
  std::uint64_t draws = 0;

  std::visit(
      Overloaded{
          [&](const UniformCube& m) {
            for (Index i = 0; i < count; ++i) {
              RandomStream rs(seed, static_cast<std::uint64_t>(first + i));
              for (Index c = 0; c < m.dim; ++c) out(c, i) = rs.uniform();
              draws += rs.draws();
            }
          },
          [&](const StdNormal& m) {
            for (Index i = 0; i < count; ++i) {
              RandomStream rs(seed, static_cast<std::uint64_t>(first + i));
              for (Index c = 0; c < m.dim; ++c) out(c, i) = rs.normal();
              draws += rs.draws();
            }
          },
          [&](const BrownianKL& m) {
            const Eigen::MatrixXd basis = scaled_kl_basis(m.k_terms, *m.grid);
            Eigen::MatrixXd z(m.k_terms, count);
            for (Index i = 0; i < count; ++i) {
              RandomStream rs(seed, static_cast<std::uint64_t>(first + i));
              for (Index l = 0; l < m.k_terms; ++l) z(l, i) = rs.normal();
              draws += rs.draws();
            }
            out.noalias() = basis * z;
          },
          [&](const Diffusion& m) {
            for (Index i = 0; i < count; ++i) {
              RandomStream rs(seed, static_cast<std::uint64_t>(first + i));
              draws += euler_fill(m.spec, m.k_steps, *m.grid, rs, out.col(i).data());
            }
          },
      },
      measure);
  return draws;
}

SampleSet sample(const MeasureSpec& measure, const SeedSpec& seed, Index count) {
  if (count < 1) throw ConfigError("sample: count must be >= 1");
  validate(measure);
  SampleSet set{space_of(measure), Eigen::MatrixXd(space_of(measure).flat_size(), count), 0};
  const Index chunks = (count + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> draws(static_cast<std::size_t>(chunks), 0);
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const Index first = static_cast<Index>(c) * kChunk;
    const Index len = std::min(kChunk, count - first);
    draws[c] = sample_into(measure, seed, first, set.data.middleCols(first, len));
  });
  for (auto d : draws) set.rng_calls += d;
  return set;
}

Path sample_brownian_kl(Index k_terms, const GridPtr& grid, const SeedSpec& seed) {
  if (k_terms < 1) throw ConfigError("sample_brownian_kl: k_terms must be >= 1");
  Eigen::MatrixXd v(grid->size(), 1);
  sample_into(BrownianKL{k_terms, grid}, seed, 0, v);
  return Path(grid, std::move(v));
}

Path euler_strong_path(const DiffusionSpec& spec, Index k, const SeedSpec& seed,
                       const GridPtr& grid) {
  if (k < 2) throw ConfigError("euler_strong_path: k must be >= 2");
  validate(Diffusion{spec, k, grid});
  Eigen::MatrixXd v(grid->size(), spec.dim);
  RandomStream rs(seed, 0);
  euler_fill(spec, k, *grid, rs, v.data());
  return Path(grid, std::move(v));
}

Estimate integrate_mc(const MeasureSpec& measure, const SeedSpec& seed, Index count,
                      const std::function<double(const Eigen::Ref<const Eigen::VectorXd>&, Index)>& fn,
                      std::uint64_t* rng_calls) {
  if (count < 1) throw ConfigError("integrate_mc: count must be >= 1");
  validate(measure);
  const Space space = space_of(measure);
  const Index chunks = (count + kChunk - 1) / kChunk;
  std::vector<RunningStats> partial(static_cast<std::size_t>(chunks));
  std::vector<std::uint64_t> draws(static_cast<std::size_t>(chunks), 0);
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const Index first = static_cast<Index>(c) * kChunk;
    const Index len = std::min(kChunk, count - first);
    Eigen::MatrixXd buf(space.flat_size(), len);
    draws[c] = sample_into(measure, seed, first, buf);
    for (Index i = 0; i < len; ++i) partial[c].add(fn(buf.col(i), first + i));
  });
  RunningStats total;
  for (const auto& p : partial) total.merge(p);
  if (rng_calls) {
    for (auto d : draws) *rng_calls += d;
  }
  return to_estimate(total);
}

Estimate reference_value(const Functional& f, const MeasureSpec& measure, Index budget,
                         const SeedSpec& seed) {
  if (budget < 100) throw ConfigError("reference_value: budget must be >= 100");
  require_oracle_dim(f, subspace_dim(measure));
  return integrate_mc(measure, seed, budget,
                      [&f](const Eigen::Ref<const Eigen::VectorXd>& x, Index i) {
                        return evaluate(f, x, i);
                      });
}

}  // namespace quantquad
