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

#include <array>
#include <cstdint>

namespace quantquad {

/// Philox4x32-10 counter-based bijection (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Root of a family of random streams. Two specs with the same fields produce
/// the same draws; anything else is independent.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// Deterministic sub-seed, used to give each purpose inside an algorithm
  /// (sample pool, restarts, fresh draws, ...) its own family of streams.
  SeedSpec child(std::uint64_t tag) const;

  bool operator==(const SeedSpec&) const = default;
};

/// Sequential view of one stream. The output for draw `j` of substream `i`
/// is a pure function of (seed, i, j), so work split across threads by `i`
/// reproduces the serial result exactly.
class RandomStream {
 public:
  RandomStream(const SeedSpec& seed, std::uint64_t substream);

  /// Uniform on the open interval (0, 1), 53 bits.
  double uniform();
  /// Standard normal via Box-Muller; consumes one counter block per pair.
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  /// Number of variates handed out so far (uniforms + normals).
  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t next64();

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t substream_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
  std::uint64_t draws_ = 0;
};

}  // namespace quantquad
