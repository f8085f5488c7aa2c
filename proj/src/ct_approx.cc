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

#include "rld/ct_approx.h"

#include <cmath>

#include "rld/errors.h"

namespace rld {

double HFunc(double x) {
  if (std::abs(x) < kHSeriesCutoff) return 1.0 - x / 2.0 + x * x / 12.0;
  return x / std::expm1(x);
}

double HPrime(double x) {
  if (std::abs(x) < kHSeriesCutoff) {
    return -0.5 + x / 6.0 - x * x * x / 180.0;
  }
  if (x > 1.0) {
    const double e = std::exp(-x);
    const double d = -std::expm1(-x);
    return ((1.0 - x) * e - e * e) / (d * d);
  }
  if (x < -1.0) {
    const double d = std::expm1(x);
    return ((1.0 - x) * std::exp(x) - 1.0) / (d * d);
  }
  // Cancelling numerator, evaluated in long double.
  const long double lx = x;
  const long double d = std::expm1(lx);
  const long double num = d - lx * std::exp(lx);
  return static_cast<double>(num / (d * d));
}

void RbmParams::Validate() const {
  if (!(volatility > 0.0)) throw DomainError("RBM volatility must be > 0");
  if (!(barrier > 0.0)) throw DomainError("RBM barrier must be > 0");
}

RbmRates RbmLongRun(const RbmParams& p) {
  p.Validate();
  const double var = p.volatility * p.volatility;
  const double scale = var / (2.0 * p.barrier);
  const double a = 2.0 * p.drift * p.barrier / var;
  return {scale * HFunc(a), -scale * HFunc(-a)};
}

double RbmDensity(double z, const RbmParams& p) {
  p.Validate();
  const double B = p.barrier;
  if (z < 0.0 || z > B) return 0.0;
  const double theta = 2.0 * p.drift / (p.volatility * p.volatility);
  if (theta == 0.0) return 1.0 / B;
  if (theta > 0.0) return theta * std::exp(theta * (z - B)) / -std::expm1(-theta * B);
  return theta * std::exp(theta * z) / std::expm1(theta * B);
}

namespace {

double CtKappa(double variance, double capacity) {
  if (!(capacity > 0.0)) throw DomainError("ct approximation needs B > 0");
  if (!(variance > 0.0)) throw DomainError("ct approximation needs variance > 0");
  return 2.0 * capacity / variance;
}

}  // namespace

double CtTerminalCost(double x_total, double d_hat, double variance,
                      double capacity, double voll) {
  const double kappa = CtKappa(variance, capacity);
  return voll / kappa * HFunc(kappa * (x_total - d_hat));
}

double CtTerminalSubgradient(double x_total, double d_hat, double variance,
                             double capacity, double voll) {
  const double kappa = CtKappa(variance, capacity);
  return voll * HPrime(kappa * (x_total - d_hat));
}

}  // namespace rld
