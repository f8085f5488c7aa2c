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

#ifndef RLD_GAUSSIAN_H_
#define RLD_GAUSSIAN_H_

#include <cmath>
#include <numbers>

namespace rld {

inline double NormalPdf(double z) {
  return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi *
                                    std::numbers::sqrt2);
}

// Phi(z) via erfc, accurate in both tails.
inline double NormalCdf(double z) {
  return 0.5 * std::erfc(-z * std::numbers::sqrt2 * 0.5);
}

// Phi^{-1}(p) for p in (0, 1).
double NormalQuantile(double p);

// E[(Y - a)_+] for Y ~ N(mean, sd^2); sd == 0 gives (mean - a)_+.
double UpperPartialExpectation(double mean, double sd, double a);

// E[Y 1{Y <= a}] and E[Y 1{Y > a}] for Y ~ N(mean, sd^2), sd > 0.
double LowerFirstMoment(double mean, double sd, double a);
double UpperFirstMoment(double mean, double sd, double a);

}  // namespace rld

#endif  // RLD_GAUSSIAN_H_
