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

#include "rld/rng.h"

#include <cmath>
#include <numbers>

#include "rld/errors.h"

namespace rld {
namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

constexpr uint32_t kPrimes[16] = {2,  3,  5,  7,  11, 13, 17, 19,
                                  23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

PhiloxCounter Philox4x32(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(kMul0) * c[0];
    const uint64_t p1 = static_cast<uint64_t>(kMul1) * c[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

double WordsToUniform(uint32_t hi, uint32_t lo) {
  const uint64_t m = (static_cast<uint64_t>(hi) << 20) | (lo >> 12);
  return (static_cast<double>(m) + 0.5) * 0x1.0p-52;
}

CounterRng::CounterRng(uint64_t seed, uint64_t stream)
    : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
      stream_(stream) {}

PhiloxCounter CounterRng::Block(uint64_t index) const {
  return Philox4x32({static_cast<uint32_t>(index),
                     static_cast<uint32_t>(index >> 32),
                     static_cast<uint32_t>(stream_),
                     static_cast<uint32_t>(stream_ >> 32)},
                    key_);
}

double CounterRng::Uniform(uint64_t index) const {
  const PhiloxCounter b = Block(index);
  return WordsToUniform(b[0], b[1]);
}

double CounterRng::Normal(uint64_t index) const {
  const PhiloxCounter b = Block(index);
  const double u1 = WordsToUniform(b[0], b[1]);
  const double u2 = WordsToUniform(b[2], b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RadicalInverse(uint64_t index, uint32_t base) {
  double inv = 1.0 / base;
  double scale = inv;
  double out = 0.0;
  while (index > 0) {
    out += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv;
  }
  return out;
}

ShiftedHalton::ShiftedHalton(int dims, uint64_t seed) {
  if (dims < 1 || dims > 16) throw DomainError("Halton dimension outside 1..16");
  const CounterRng rng(seed, kQmcStream);
  shift_.resize(dims);
  for (int d = 0; d < dims; ++d) shift_[d] = rng.Uniform(d);
}

void ShiftedHalton::Point(uint64_t index, double* out) const {
  for (int d = 0; d < dims(); ++d) {
    double u = RadicalInverse(index + 1, kPrimes[d]) + shift_[d];
    if (u >= 1.0) u -= 1.0;
    if (u <= 0.0) u = 0x1.0p-53;
    out[d] = u;
  }
}

}  // namespace rld
