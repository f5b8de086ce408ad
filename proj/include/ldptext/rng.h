//
// Copyright 2026 The ldptext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LDPTEXT_RNG_H_
#define LDPTEXT_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ldptext {

// Deterministic random stream keyed by (seed, stream_id). Streams with
// different ids are seeded from disjoint seed_seq inputs, so documents and
// repeats can draw in any order or in parallel and still reproduce.
// Single owner: do not share one stream across threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  // Uniform on (0, 1); never returns 0.
  double UniformOpen();
  // Uniform integer in [0, n).
  std::uint64_t UniformInt(std::uint64_t n);
  double Normal();
  double Gamma(double shape, double scale);
  // Zero-mean Laplace with the given scale (density exp(-|x|/b) / 2b).
  double Laplace(double scale);
  // Standard Gumbel(0, 1).
  double Gumbel();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

RngStream MakeRng(std::uint64_t seed, std::uint64_t stream_id);

// Mixes several components (cell index, repeat, document index, ...) into a
// single stream id.
std::uint64_t StreamId(std::initializer_list<std::uint64_t> parts);

}  // namespace ldptext

#endif  // LDPTEXT_RNG_H_
