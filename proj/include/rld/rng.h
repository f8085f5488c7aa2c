// Copyright 2026 The RLD Authors
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

// Counter-based random numbers: every variate is a pure function of
// (seed, stream, index), so sample paths do not depend on evaluation order
// or thread count.

#ifndef RLD_RNG_H_
#define RLD_RNG_H_

#include <array>
#include <cstdint>
#include <vector>

namespace rld {

using PhiloxCounter = std::array<uint32_t, 4>;
using PhiloxKey = std::array<uint32_t, 2>;

// Philox4x32 with 10 rounds.
PhiloxCounter Philox4x32(PhiloxCounter counter, PhiloxKey key);

// Uniform in the open interval (0, 1) from two 32-bit words (52 bits).
double WordsToUniform(uint32_t hi, uint32_t lo);

class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream);

  PhiloxCounter Block(uint64_t index) const;
  double Uniform(uint64_t index) const;
  // Standard normal by Box-Muller on one block.
  double Normal(uint64_t index) const;

 private:
  PhiloxKey key_;
  uint64_t stream_;
};

// Stream identifiers used by the simulators.
inline constexpr uint64_t kPathStream = 0x70617468ULL;
inline constexpr uint64_t kSampleStream = 0x73616d70ULL;
inline constexpr uint64_t kQmcStream = 0x716d6321ULL;

// Halton sequence with a Cranley-Patterson rotation.
class ShiftedHalton {
 public:
  // Throws DomainError for dims outside 1..16.
  ShiftedHalton(int dims, uint64_t seed);

  int dims() const { return static_cast<int>(shift_.size()); }
  // Point `index` (0-based); every coordinate lies in (0, 1).
  void Point(uint64_t index, double* out) const;

 private:
  std::vector<double> shift_;
};

double RadicalInverse(uint64_t index, uint32_t base);

}  // namespace rld

#endif  // RLD_RNG_H_
