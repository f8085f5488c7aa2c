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

// Continuous-time approximation of the storage level as a reflected
// Brownian motion on [0, B].

#ifndef RLD_CT_APPROX_H_
#define RLD_CT_APPROX_H_

namespace rld {

// h(x) = x / (e^x - 1), h(0) = 1.
double HFunc(double x);
// h'(x) = ((1 - x) e^x - 1) / (e^x - 1)^2, h'(0) = -1/2.
double HPrime(double x);

// Below this magnitude h and h' use their Taylor series.
inline constexpr double kHSeriesCutoff = 1e-4;

struct RbmParams {
  double drift = 0.0;       // energy per unit time
  double volatility = 1.0;  // energy per sqrt(unit time)
  double barrier = 1.0;     // B

  // Throws DomainError unless volatility > 0 and barrier > 0.
  void Validate() const;
};

struct RbmRates {
  double v_rate = 0.0;  // long-run d V / dt, pushes at the empty boundary
  double q_rate = 0.0;  // long-run d Q / dt, pushes at the full boundary
};

RbmRates RbmLongRun(const RbmParams& params);

// Steady-state density of the level; 0 outside [0, B].
double RbmDensity(double z, const RbmParams& params);

// Long-run VOLL cost over the delivery interval of an interval-total
// position x_total against an interval-total forecast d_hat with
// within-interval variance `variance`:
//   (c variance / 2B) h((2B / variance)(x_total - d_hat)).
// Throws DomainError unless capacity > 0 and variance > 0.
double CtTerminalCost(double x_total, double d_hat, double variance,
                      double capacity, double voll);
double CtTerminalSubgradient(double x_total, double d_hat, double variance,
                             double capacity, double voll);

}  // namespace rld

#endif  // RLD_CT_APPROX_H_
