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

#include "quantquad/io.hpp"

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace quantquad {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

Index parse_index(const std::string& text, const std::string& context) {
  Index v = 0;
  const auto t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(context + ": expected an integer, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& context) {
  std::uint64_t v = 0;
  const auto t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(context + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

// "name(arg)" -> arg, or nullopt if text is not of that form.
std::optional<std::string> call_arg(const std::string& text, const std::string& name) {
  if (text.size() < name.size() + 2 || text.compare(0, name.size() + 1, name + "(") != 0 ||
      text.back() != ')') {
    return std::nullopt;
  }
  return trim(text.substr(name.size() + 1, text.size() - name.size() - 2));
}

GridPtr grid_from(const std::string& text) {
  return Grid::uniform(parse_index(text, "grid size"));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double_strict(const std::string& text, const std::string& context) {
  const auto t = trim(text);
  double v = 0.0;
  const char* begin = t.data();
  if (!t.empty() && t.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(context + ": expected a number, got '" + text + "'");
  }
  return v;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    os << content;
    os.flush();
    if (!os) {
      os.close();
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw std::runtime_error("cannot move output into '" + path + "': " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// ------------------------------------------------------------- codebooks ---

std::string format_codebook(const Codebook& cb, const std::vector<std::string>& comments) {
  cb.validate();
  std::ostringstream os;
  os << "quantquad-codebook v1, " << cb.size() << ", ";
  const Space& sp = cb.space;
  if (sp.is_path()) {
    os << "grid=" << sp.grid->size();
    if (sp.dim != 1) os << "x" << sp.dim;
  } else {
    os << "dim=" << sp.dim;
  }
  os << ", " << format_double(cb.order_r) << ", " << to_string(cb.norm) << ", " << cb.measure_tag << "\n";
  for (const auto& c : comments) os << "# " << c << "\n";
  if (sp.is_path() && !sp.grid->is_uniform()) {
    os << "grid";
    for (Index j = 0; j < sp.grid->size(); ++j) os << "," << format_double((*sp.grid)[j]);
    os << "\n";
  }
  if (cb.span_dim) os << "span_dim," << *cb.span_dim << "\n";
  const Index g = sp.is_path() ? sp.grid->size() : 1;
  const Index m = sp.dim;
  for (Index i = 0; i < cb.size(); ++i) {
    bool first = true;
    auto put = [&](double v) {
      os << (first ? "" : ",") << format_double(v);
      first = false;
    };
    if (sp.is_path()) {
      for (Index j = 0; j < g; ++j) {
        for (Index c = 0; c < m; ++c) put(cb.points(c * g + j, i));
      }
    } else {
      for (Index c = 0; c < m; ++c) put(cb.points(c, i));
    }
    os << "\n";
  }
  if (cb.weights) {
    os << "weights";
    for (Index i = 0; i < cb.size(); ++i) os << "," << format_double((*cb.weights)[i]);
    os << "\n";
  }
  return os.str();
}

Codebook parse_codebook(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("empty codebook file", 1);
  const auto head = split(lines[0], ',');
  if (head.empty() || head[0].rfind("quantquad-codebook", 0) != 0) {
    throw ParseError("not a quantquad codebook header", 1);
  }
  if (head[0] != "quantquad-codebook v1") throw ParseError("unsupported codebook version '" + head[0] + "'", 1);
  if (head.size() != 6) throw ParseError("header needs 6 fields", 1);

  Codebook cb;
  Index n = 0, g = 0, m = 1;
  bool path = false;
  try {
    n = parse_index(head[1], "n");
    if (n < 1) throw ConfigError("n must be >= 1");
    if (head[2].rfind("dim=", 0) == 0) {
      m = parse_index(head[2].substr(4), "dim");
    } else if (head[2].rfind("grid=", 0) == 0) {
      path = true;
      const std::string spec = head[2].substr(5);
      const auto x = spec.find('x');
      g = parse_index(spec.substr(0, x), "grid");
      if (x != std::string::npos) m = parse_index(spec.substr(x + 1), "channels");
    } else {
      throw ConfigError("expected dim=<d> or grid=<G>");
    }
    if (m < 1) throw ConfigError("dimension must be >= 1");
    cb.order_r = parse_double_strict(head[3], "r");
    cb.norm = parse_norm_kind(head[4]);
    cb.measure_tag = head[5];
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), 1);
  }

  GridPtr grid;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string line = trim(lines[li]);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    try {
      if (cells[0] == "grid") {
        Eigen::VectorXd pts(static_cast<Index>(cells.size()) - 1);
        for (Index j = 0; j < pts.size(); ++j) pts[j] = parse_double_strict(cells[j + 1], "grid");
        grid = std::make_shared<const Grid>(pts);
      } else if (cells[0] == "span_dim") {
        if (cells.size() != 2) throw ConfigError("span_dim row needs one value");
        cb.span_dim = parse_index(cells[1], "span_dim");
      } else if (cells[0] == "weights") {
        if (static_cast<Index>(cells.size()) != n + 1) throw ConfigError("weights row needs n values");
        Eigen::VectorXd w(n);
        for (Index i = 0; i < n; ++i) w[i] = parse_double_strict(cells[i + 1], "weight");
        cb.weights = std::move(w);
      } else {
        if (cb.weights) throw ConfigError("point rows must precede the weights row");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_double_strict(c, "point"));
        rows.push_back(std::move(row));
        row_lines.push_back(li + 1);
      }
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), li + 1);
    }
  }
  if (static_cast<Index>(rows.size()) != n) {
    throw ParseError("expected " + std::to_string(n) + " point rows, found " + std::to_string(rows.size()),
                     lines.size());
  }
  if (path) {
    if (!grid) grid = Grid::uniform(g);
    if (grid->size() != g) throw ParseError("grid row length does not match header", 1);
    cb.space = Space::paths(grid, m);
  } else {
    cb.space = Space::euclidean(m);
  }
  const Index flat = cb.space.flat_size();
  cb.points.resize(flat, n);
  for (Index i = 0; i < n; ++i) {
    if (static_cast<Index>(rows[i].size()) != flat) {
      throw ParseError("point row has " + std::to_string(rows[i].size()) + " values, expected " +
                           std::to_string(flat),
                       row_lines[i]);
    }
    if (path) {
      for (Index j = 0; j < g; ++j) {
        for (Index c = 0; c < m; ++c) cb.points(c * g + j, i) = rows[i][j * m + c];
      }
    } else {
      for (Index c = 0; c < m; ++c) cb.points(c, i) = rows[i][c];
    }
  }
  try {
    cb.validate();
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), 1);
  }
  return cb;
}

void save_codebook(const Codebook& cb, const std::string& path, const std::vector<std::string>& comments) {
  write_file_atomic(path, format_codebook(cb, comments));
}

Codebook load_codebook(const std::string& path) { return parse_codebook(read_file(path)); }

// ------------------------------------------------------ paths, subspaces ---

std::string format_path_csv(const Path& path) {
  std::ostringstream os;
  for (Index j = 0; j < path.grid->size(); ++j) {
    os << format_double((*path.grid)[j]);
    for (Index c = 0; c < path.channels(); ++c) os << "," << format_double(path.values(j, c));
    os << "\n";
  }
  return os.str();
}

Path parse_path_csv(const std::string& text) {
  const auto lines = lines_of(text);
  std::vector<double> ts;
  std::vector<std::vector<double>> vals;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string line = trim(lines[li]);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (cells.size() < 2) throw ParseError("path row needs t and at least one value", li + 1);
    try {
      ts.push_back(parse_double_strict(cells[0], "t"));
      std::vector<double> row;
      for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(parse_double_strict(cells[c], "value"));
      if (!vals.empty() && row.size() != vals.front().size()) throw ConfigError("ragged path rows");
      vals.push_back(std::move(row));
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), li + 1);
    }
  }
  if (ts.size() < 2) throw ParseError("a path needs at least two rows", lines.size());
  const auto g = static_cast<Index>(ts.size());
  const auto m = static_cast<Index>(vals.front().size());
  Eigen::MatrixXd v(g, m);
  for (Index j = 0; j < g; ++j) {
    for (Index c = 0; c < m; ++c) v(j, c) = vals[j][c];
  }
  GridPtr grid = std::make_shared<const Grid>(Eigen::Map<const Eigen::VectorXd>(ts.data(), g));
  if (grid->is_uniform()) grid = Grid::uniform(g);
  return Path(grid, std::move(v));
}

std::string format_subspace_csv(const Subspace& sub) {
  std::ostringstream os;
  const Space& sp = sub.space();
  os << "kind=" << sub.kind_name() << ",dim=" << sub.dim() << ",grid=" << sp.grid->size();
  if (sp.dim != 1) os << ",channels=" << sp.dim;
  os << "\n";
  for (Index r = 0; r < sub.basis().rows(); ++r) {
    for (Index c = 0; c < sub.dim(); ++c) os << (c ? "," : "") << format_double(sub.basis()(r, c));
    os << "\n";
  }
  return os.str();
}

Subspace parse_subspace_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("empty subspace file", 1);
  std::map<std::string, std::string> head;
  for (const auto& field : split(lines[0], ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ParseError("header field '" + field + "' is not key=value", 1);
    head[field.substr(0, eq)] = field.substr(eq + 1);
  }
  Index k = 0, g = 0, m = 1;
  Subspace::Kind kind = Subspace::Kind::PiecewiseLinear;
  try {
    if (!head.count("kind") || !head.count("dim") || !head.count("grid")) {
      throw ConfigError("header needs kind, dim and grid");
    }
    k = parse_index(head["dim"], "dim");
    g = parse_index(head["grid"], "grid");
    if (head.count("channels")) m = parse_index(head["channels"], "channels");
    if (head["kind"] == "kl") {
      kind = Subspace::Kind::KarhunenLoeve;
    } else if (head["kind"] != "piecewise_linear") {
      throw ConfigError("unknown subspace kind '" + head["kind"] + "'");
    }
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), 1);
  }
  Eigen::MatrixXd basis(g * m, k);
  Index row = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string line = trim(lines[li]);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (static_cast<Index>(cells.size()) != k || row >= g * m) {
      throw ParseError("basis row does not match the header", li + 1);
    }
    try {
      for (Index c = 0; c < k; ++c) basis(row, c) = parse_double_strict(cells[c], "basis");
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), li + 1);
    }
    ++row;
  }
  if (row != g * m) throw ParseError("expected " + std::to_string(g * m) + " basis rows", lines.size());
  return Subspace(Space::paths(Grid::uniform(g), m), basis, kind);
}

// ------------------------------------------------- measures, functionals ---

namespace {

MeasureSpec parse_measure_fields(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.find('=') == std::string::npos) {
    const auto parts = split(text, ':');
    const std::string& kind = parts[0];
    auto arg = [&](std::size_t i, Index fallback) {
      return parts.size() > i ? parse_index(parts[i], kind) : fallback;
    };
    if (parts.size() > 3) throw ConfigError("measure '" + text + "': too many fields");
    if (kind == "uniform_cube") return UniformCube{arg(1, 1)};
    if (kind == "std_normal") return StdNormal{arg(1, 1)};
    if (kind == "brownian_kl") return BrownianKL{arg(1, 200), Grid::uniform(arg(2, 257))};
    if (kind == "brownian") return brownian_on_grid(Grid::uniform(arg(1, 257)));
    throw ConfigError("unknown measure '" + text +
                      "' (uniform_cube:d, std_normal:d, brownian_kl:k[:G], brownian:G, or kind=...)");
  }

  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("measure field '" + tok + "' is not key=value");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto take = [&](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  const std::string kind = take("kind", "");
  MeasureSpec out;
  if (kind == "uniform_cube") {
    out = UniformCube{parse_index(take("d", "1"), "d")};
  } else if (kind == "std_normal") {
    out = StdNormal{parse_index(take("d", "1"), "d")};
  } else if (kind == "brownian_kl") {
    const Index k = parse_index(take("k_terms", "200"), "k_terms");
    out = BrownianKL{k, grid_from(take("grid", "257"))};
  } else if (kind == "brownian") {
    out = brownian_on_grid(grid_from(take("grid", "257")));
  } else if (kind == "diffusion") {
    const Coefficient a = Coefficient::parse(take("drift", "constant:0"));
    const Coefficient b = Coefficient::parse(take("diffusion", "constant:1"));
    const auto u0_cells = split(take("u0", "0"), ',');
    Eigen::VectorXd u0(static_cast<Index>(u0_cells.size()));
    for (Index c = 0; c < u0.size(); ++c) u0[c] = parse_double_strict(u0_cells[c], "u0");
    const Index k = parse_index(take("k_steps", "2"), "k_steps");
    out = Diffusion{DiffusionSpec::from_families(a, b, u0), k, grid_from(take("grid", "257"))};
  } else {
    throw ConfigError("unknown measure kind '" + kind + "'");
  }
  if (!kv.empty()) throw ConfigError("measure: unknown field '" + kv.begin()->first + "'");
  validate(out);
  return out;
}
}  // namespace

MeasureSpec parse_measure(const std::string& text) {
  MeasureSpec m = parse_measure_fields(text);
  validate(m);
  return m;
}

Functional parse_functional(const std::string& raw, const Space& space) {
  const std::string text = trim(raw);
  if (text == "sup_norm") return functionals::sup_norm(space);
  if (text == "sup_value") return functionals::sup_value(space);
  if (text == "l1_integral") return functionals::l1_integral(space);
  if (auto a = call_arg(text, "coord_at")) {
    return functionals::coord_at(space, parse_double_strict(*a, "coord_at"));
  }
  if (auto a = call_arg(text, "abs_coord_at")) {
    return functionals::abs_coord_at(space, parse_double_strict(*a, "abs_coord_at"));
  }
  if (auto a = call_arg(text, "coord")) return functionals::coordinate(space, parse_index(*a, "coord"));
  if (auto a = call_arg(text, "abs_dev")) {
    return functionals::abs_deviation(space, parse_double_strict(*a, "abs_dev"));
  }
  if (auto a = call_arg(text, "dist_to_codebook")) {
    const Codebook cb = load_codebook(*a);
    require_same_space(cb.space, space, "dist_to_codebook");
    return dist_to_codebook(cb);
  }
  throw ConfigError("unknown functional '" + text +
                    "' (coord_at(t), abs_coord_at(t), sup_norm, sup_value, l1_integral, coord(i), "
                    "abs_dev(c), dist_to_codebook(file))");
}

// ---------------------------------------------------------------- config ---

ConfigMap parse_config(const std::string& text) {
  ConfigMap out;
  const auto lines = lines_of(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::string line = lines[li];
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", li + 1);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", li + 1);
    if (out.count(key)) throw ParseError("duplicate key '" + key + "'", li + 1);
    out[key] = {trim(line.substr(eq + 1)), li + 1};
  }
  return out;
}

RateConfig parse_rate_config(const ConfigMap& cfg) {
  RateConfig rc;
  auto value = [&](const std::string& key) -> const ConfigEntry* {
    const auto it = cfg.find(key);
    return it == cfg.end() ? nullptr : &it->second;
  };
  auto with_line = [&](const std::string& key, auto&& fn) {
    const ConfigEntry* e = value(key);
    if (!e) return;
    try {
      fn(e->value);
    } catch (const ConfigError& err) {
      throw ParseError(key + ": " + err.what(), e->line);
    }
  };
  static const char* known[] = {"name", "algorithm", "measure", "functional", "ladder", "replications",
                                "codebook", "lloyd_pool", "reference", "reference_budget", "reference_k",
                                "alpha", "beta", "samples", "order", "norm", "transform", "slope_lo",
                                "slope_hi", "require_decreasing", "seed", "stream"};
  for (const auto& [key, entry] : cfg) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ParseError("unknown key '" + key + "'", entry.line);
    }
  }
  if (!value("algorithm")) throw ParseError("missing key 'algorithm'", 1);
  if (!value("measure")) throw ParseError("missing key 'measure'", 1);
  if (!value("ladder")) throw ParseError("missing key 'ladder'", 1);

  with_line("name", [&](const std::string& v) { rc.name = v; });
  with_line("algorithm", [&](const std::string& v) { rc.algorithm = v; });
  with_line("measure", [&](const std::string& v) {
    rc.measure = parse_measure(v);
    rc.measure_text = v;
  });
  with_line("functional", [&](const std::string& v) {
    rc.functional = parse_functional(v, space_of(rc.measure));
    rc.functional_text = v;
  });
  with_line("ladder", [&](const std::string& v) {
    for (const auto& c : split(v, ',')) rc.ladder.push_back(parse_double_strict(c, "ladder"));
  });
  with_line("replications", [&](const std::string& v) { rc.replications = parse_index(v, "replications"); });
  with_line("codebook", [&](const std::string& v) { rc.codebook = v; });
  with_line("lloyd_pool", [&](const std::string& v) { rc.lloyd_pool = parse_index(v, "lloyd_pool"); });
  with_line("reference", [&](const std::string& v) {
    if (v.rfind("exact:", 0) == 0) {
      rc.exact_reference = parse_double_strict(v.substr(6), "reference");
    } else if (v != "mc") {
      throw ConfigError("expected exact:<value> or mc");
    }
  });
  with_line("reference_budget", [&](const std::string& v) { rc.reference_budget = parse_index(v, "reference_budget"); });
  with_line("reference_k", [&](const std::string& v) { rc.reference_k = parse_index(v, "reference_k"); });
  with_line("alpha", [&](const std::string& v) { rc.profile.alpha = parse_double_strict(v, "alpha"); });
  with_line("beta", [&](const std::string& v) { rc.profile.beta = parse_double_strict(v, "beta"); });
  with_line("samples", [&](const std::string& v) { rc.distortion_samples = parse_index(v, "samples"); });
  with_line("order", [&](const std::string& v) { rc.order = parse_double_strict(v, "order"); });
  with_line("norm", [&](const std::string& v) { rc.norm = parse_norm_kind(v); });
  with_line("transform", [&](const std::string& v) { rc.transform = parse_rate_transform(v); });
  with_line("slope_lo", [&](const std::string& v) { rc.slope_lo = parse_double_strict(v, "slope_lo"); });
  with_line("slope_hi", [&](const std::string& v) { rc.slope_hi = parse_double_strict(v, "slope_hi"); });
  with_line("require_decreasing", [&](const std::string& v) {
    if (v != "true" && v != "false") throw ConfigError("expected true or false");
    rc.require_decreasing = v == "true";
  });
  with_line("seed", [&](const std::string& v) { rc.seed.master_seed = parse_u64(v, "seed"); });
  with_line("stream", [&](const std::string& v) { rc.seed.stream_index = parse_u64(v, "stream"); });
  return rc;
}

std::vector<std::string> describe_rate_config(const RateConfig& cfg) {
  std::vector<std::string> out;
  out.push_back("name=" + cfg.name);
  out.push_back("algorithm=" + cfg.algorithm);
  out.push_back("measure=" + describe(cfg.measure));
  if (cfg.functional) out.push_back("functional=" + cfg.functional_text);
  std::string ladder;
  for (double s : cfg.ladder) ladder += (ladder.empty() ? "" : ",") + format_double(s);
  out.push_back("ladder=" + ladder);
  out.push_back("replications=" + std::to_string(cfg.replications));
  if (cfg.algorithm == "vrmc") {
    out.push_back("codebook=" + cfg.codebook);
    out.push_back("lloyd_pool=" + std::to_string(cfg.lloyd_pool));
  }
  out.push_back("reference=" + (cfg.exact_reference ? "exact:" + format_double(*cfg.exact_reference) : "mc"));
  out.push_back("reference_budget=" + std::to_string(cfg.reference_budget));
  out.push_back("reference_k=" + std::to_string(cfg.reference_k));
  out.push_back("alpha=" + format_double(cfg.profile.alpha));
  out.push_back("beta=" + format_double(cfg.profile.beta));
  out.push_back("samples=" + std::to_string(cfg.distortion_samples));
  out.push_back("order=" + format_double(cfg.order));
  out.push_back("norm=" + to_string(cfg.norm));
  out.push_back("transform=" + to_string(cfg.transform));
  if (cfg.slope_lo) out.push_back("slope_lo=" + format_double(*cfg.slope_lo));
  if (cfg.slope_hi) out.push_back("slope_hi=" + format_double(*cfg.slope_hi));
  out.push_back(std::string("require_decreasing=") + (cfg.require_decreasing ? "true" : "false"));
  out.push_back("seed=" + std::to_string(cfg.seed.master_seed));
  out.push_back("stream=" + std::to_string(cfg.seed.stream_index));
  return out;
}

}  // namespace quantquad
