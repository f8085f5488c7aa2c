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

// Backward solution of the multi-stage threshold equations.
//
// Thresholds are expressed as offsets Delta_r = psi_r - F_r from the
// stage-r forecast F_r of the interval deficit. The forecast moves by
// independent Gaussian revisions e_{r+1}, ..., e_R between stages and by the
// mean error e_{R+1} revealed at delivery. With position x after stage r
// and Delta = x - F_r, the marginal cost-to-go is
//
//   E[ sum_j -c_j 1{first trade at j} + 1{no trade} G(Delta - E_{R+1}) ],
//
// where E_j = e_{r+1} + ... + e_j, stage j trades when Delta crosses
// Delta_j + E_j in its direction, and G(y) is the terminal subgradient at
// offset y from the delivery forecast. The expectation is a quasi-Monte
// Carlo average over a fixed point set, so the objective is a deterministic
// function of Delta across bisection iterates.

#ifndef RLD_THRESHOLD_RECURSION_H_
#define RLD_THRESHOLD_RECURSION_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "rld/core_model.h"

namespace rld {

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Root of a nondecreasing f: expands [center - scale, center + scale]
// geometrically until f changes sign, then bisects until |f| <= tolerance or
// the bracket collapses. Throws SolverError when no sign change is found.
RootResult BracketedRoot(const std::function<double(double)>& f, double center,
                         double scale, double tolerance);

struct NestedStage {
  double price = 0.0;
  Direction direction = Direction::kBuy;
  // Std of the forecast revision revealed after this stage: before the next
  // stage, or at delivery for the last stage.
  double revision_sd = 0.0;
};

struct NestedOptions {
  int samples = 200000;
  uint64_t seed = 1;
  double tolerance = 1e-6;  // relative to the VOLL
};

struct NestedSolution {
  std::vector<double> offsets;  // Delta_r, r = 1..R
  std::vector<double> residuals;
  std::vector<int> iterations;
};

// `terminal` is G(y), nondecreasing with values in [-voll, 0].
NestedSolution SolveNestedThresholds(
    const std::vector<NestedStage>& stages,
    const std::function<double(double)>& terminal, double voll,
    const NestedOptions& options);

// The marginal cost-to-go after stage r (1-based) at offset delta, for
// known offsets of stages r+1..R. Exposed for diagnostics and tests.
class NestedObjective {
 public:
  NestedObjective(const std::vector<NestedStage>& stages, int r,
                  const std::vector<double>& later_offsets,
                  const std::function<double(double)>& terminal,
                  const NestedOptions& options);

  double operator()(double delta) const;
  double total_sd() const { return total_sd_; }

 private:
  std::vector<NestedStage> later_;
  std::vector<double> later_offsets_;
  std::function<double(double)> terminal_;
  int samples_ = 0;
  int dims_ = 0;
  std::vector<double> cumulative_;  // samples x dims, row-major
  double total_sd_ = 0.0;
};

}  // namespace rld

#endif  // RLD_THRESHOLD_RECURSION_H_
