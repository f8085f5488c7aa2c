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

// Optimal operation of a fast storage device over the delivery interval.
//
// The delivery interval has T stages. At each stage the conventional supply
// is x (per stage), the realized net deficit is D_t, and the storage device
// recharges u_t > 0 or discharges u_t < 0. Unserved energy is
// [D_t - x + u_t]_+ and is charged at the VOLL.

#ifndef RLD_STORAGE_OPS_H_
#define RLD_STORAGE_OPS_H_

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rld/core_model.h"

namespace rld {

// Greedy optimal control: charge the surplus up to the free capacity,
// discharge to cover the shortfall up to the usable stored energy.
// Throws DomainError if b is outside [0, B].
double OptimalStorageAction(double b, double deficit, double x,
                            const StorageSpec& spec);

// b' = lambda (b + mu [u]_+ + [u]_- / nu). Throws DomainError when u is not
// in the feasible set of level b.
double StepStorage(double b, double u, const StorageSpec& spec);

struct PathOutcome {
  std::vector<double> deficit;   // D_t
  std::vector<double> action;    // u_t
  std::vector<double> level;     // b_t before the stage-t control; size T+1
  std::vector<double> unserved;  // [D_t - x + u_t]_+
  std::vector<double> V;         // cumulative unserved energy
  std::vector<double> Q;         // cumulative curtailment, nonpositive
  double x = 0.0;
  double cost = 0.0;             // c * V_T

  int T() const { return static_cast<int>(deficit.size()); }
};

// Runs the greedy optimal control from an empty device.
PathOutcome SimulateDelivery(std::span<const double> deficits, double x,
                             const StorageSpec& spec, const CostModel& cost);

// Unserved energy only (no allocation); ideal device. Used in hot loops.
double IdealDeliveryShortfall(std::span<const double> deficits, double x,
                              double capacity);

// Cumulative processes of an ideal-storage path plus a check of the
// reformulation: V moves only when the device ends the stage empty, Q only
// when it ends full, and b_{t+1} = -sum (D - x) + V_t + Q_t.
struct VqReport {
  std::vector<double> V;
  std::vector<double> Q;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Throws DomainError for a non-ideal device.
VqReport ReformulateVq(const PathOutcome& outcome, const StorageSpec& spec);

// Pathwise derivative of the delivery cost in the accumulated position
// x_{R+1} = T x, for an ideal device of capacity B:
//   -(c / T) sum_t (h_t + 1) 1{unserved_t > 0},
// where h_t counts the stages since the device last sat at a boundary.
double PerPathSubgradientEstimate(std::span<const double> deficits, double x,
                                  double capacity, double voll);

// Boundary tolerance used to classify empty/full levels.
double BoundaryTolerance(double capacity);

// CSV `t,D_t,u_t,b_t,unserved,V,Q` with t counted from 1.
void WritePathCsv(const PathOutcome& outcome, std::ostream& out);

}  // namespace rld

#endif  // RLD_STORAGE_OPS_H_
