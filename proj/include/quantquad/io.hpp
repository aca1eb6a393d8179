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

#pragma once

#include <map>
#include <string>
#include <vector>

#include "quantquad/experiments.hpp"
#include "quantquad/functional.hpp"
#include "quantquad/measures.hpp"
#include "quantquad/quantize.hpp"
#include "quantquad/subspace.hpp"

namespace quantquad {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);
double parse_double_strict(const std::string& text, const std::string& context);

/// Writes via a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Codebook text format:
///   quantquad-codebook v1, <n>, dim=<d> | grid=<G>[x<m>], <r>, <norm>, <measure_tag>
///   # free comment lines (config echo)
///   [grid,<t_0>,...]        only for non-uniform grids
///   [span_dim,<k>]
///   one CSV row per point (paths row-major over the grid)
///   [weights,<w_1>,...]
std::string format_codebook(const Codebook& cb, const std::vector<std::string>& comments = {});
Codebook parse_codebook(const std::string& text);
void save_codebook(const Codebook& cb, const std::string& path,
                   const std::vector<std::string>& comments = {});
Codebook load_codebook(const std::string& path);

/// CSV rows t,v_1..v_m.
std::string format_path_csv(const Path& path);
Path parse_path_csv(const std::string& text);

/// Header "kind=<kind>,dim=<k>,grid=<G>[,channels=<m>]", then one row per
/// flat coordinate holding the k basis values.
std::string format_subspace_csv(const Subspace& sub);
Subspace parse_subspace_csv(const std::string& text);

/// Measures: "uniform_cube:d", "std_normal:d", "brownian_kl:k[:G]",
/// "brownian:G" (exact on the grid), or the key=value form
/// "kind=diffusion drift=linear:0.1 diffusion=linear:0.2 u0=1 k_steps=101 grid=257".
MeasureSpec parse_measure(const std::string& text);

/// Functionals by name: coord_at(t), abs_coord_at(t), sup_norm, sup_value,
/// l1_integral, coord(i), abs_dev(c), dist_to_codebook(file).
Functional parse_functional(const std::string& text, const Space& space);

/// key=value lines; '#' starts a comment. Duplicate keys are rejected.
struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};
using ConfigMap = std::map<std::string, ConfigEntry>;
ConfigMap parse_config(const std::string& text);

/// Rate experiment from a config map. Keys: name, algorithm, measure,
/// functional, ladder (comma list), replications, codebook, lloyd_pool,
/// reference (exact:<v> or mc), reference_budget, reference_k, alpha, beta,
/// samples, order, norm, transform, slope_lo, slope_hi, require_decreasing,
/// seed, stream.
RateConfig parse_rate_config(const ConfigMap& cfg);
/// Canonical key=value echo of a rate config.
std::vector<std::string> describe_rate_config(const RateConfig& cfg);

}  // namespace quantquad
