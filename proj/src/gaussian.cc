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

#include "rld/gaussian.h"

#include <algorithm>

#include <boost/math/distributions/normal.hpp>

#include "rld/errors.h"

namespace rld {

double NormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal quantile needs p in (0, 1)");
  }
  static const boost::math::normal_distribution<double> kStandard;
  return boost::math::quantile(kStandard, p);
}

double UpperPartialExpectation(double mean, double sd, double a) {
  if (sd <= 0.0) return std::max(0.0, mean - a);
  const double z = (mean - a) / sd;
  return sd * NormalPdf(z) + (mean - a) * NormalCdf(z);
}

double LowerFirstMoment(double mean, double sd, double a) {
  const double z = (a - mean) / sd;
  return mean * NormalCdf(z) - sd * NormalPdf(z);
}

double UpperFirstMoment(double mean, double sd, double a) {
  const double z = (a - mean) / sd;
  return mean * NormalCdf(-z) + sd * NormalPdf(z);
}

}  // namespace rld
