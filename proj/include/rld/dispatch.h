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

// Threshold policies for the market ladder and their simulation.
//
// Positions and thresholds are interval totals. The stage-r forecast of the
// interval deficit is F_r = sum(d_hat) + e_2 + ... + e_r; a schedule stores
// offsets Delta_r and trades toward psi_r = Delta_r + F_r.

#ifndef RLD_DISPATCH_H_
#define RLD_DISPATCH_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rld/core_model.h"
#include "rld/threshold_recursion.h"

namespace rld {

enum class Engine { kLattice, kMc, kCt, kThreeSigma };

const char* EngineName(Engine engine);
// Accepts lattice, mc, ct, 3sigma. Throws ParseError otherwise.
Engine ParseEngine(const std::string& name);

struct StageThreshold {
  int stage = 1;
  double lead_time_hours = 0.0;
  double price = 0.0;
  Direction direction = Direction::kBuy;
  double offset = 0.0;     // Delta_r
  double threshold = 0.0;  // psi_r at the nominal forecast
  double residual = 0.0;   // c_r + marginal cost-to-go at psi_r
  int iterations = 0;
};

struct ThresholdSchedule {
  Engine engine = Engine::kLattice;
  std::vector<StageThreshold> stages;

  double Threshold(int r, double forecast_total) const {
    return stages.at(r - 1).offset + forecast_total;
  }
};

// Buy: [psi - x]_+. Sell: -[x - psi]_+.
double DispatchDecision(double x, double psi, Direction direction);

// Root of c_r + subgradient(psi) = 0 around `center`. Throws SolverError
// unless 0 < c_r < voll and the range of the subgradient contains -c_r.
RootResult SolveStageThreshold(double price,
                               const std::function<double(double)>& subgradient,
                               double center, double scale, double voll);

struct SolverOptions {
  NestedOptions nested;
  int mc_paths = 20000;
  uint64_t mc_seed = 7;
  int mc_table_nodes = 257;
  int table_initial_nodes = 33;
  int table_max_nodes = 1025;
  double table_tolerance = 1e-6;  // relative to the VOLL
};

// G(y): subgradient of the expected delivery cost in x_total at offset y
// from the delivery forecast, under the scenario's within-interval errors.
std::function<double(double)> TerminalSubgradient(const Scenario& scenario,
                                                  Engine engine,
                                                  const SolverOptions& options);

// Half-width of the offset range over which G is not yet saturated.
double TerminalOffsetRange(const Scenario& scenario);

// Engines lattice, mc and ct. Throws SolverError/DomainError on failure.
ThresholdSchedule SolveThresholdsBackward(const Scenario& scenario,
                                          Engine engine,
                                          const SolverOptions& options = {});

// Continuous-time engine.
ThresholdSchedule SolveCtThresholds(const Scenario& scenario,
                                    const SolverOptions& options = {});

// Delta_r = 3 sigma(t_r).
ThresholdSchedule ThreeSigmaSchedule(const Scenario& scenario);

ThresholdSchedule MakeSchedule(const Scenario& scenario, Engine engine,
                               const SolverOptions& options = {});

struct IdealResult {
  double x = 0.0;     // per-stage supply
  double cost = 0.0;  // c_1 T x + c V(x)
};

// Perfect-foresight cost of one deficit path: one purchase at the first
// price, then greedy ideal storage. With `nonnegative`, x >= 0.
IdealResult IdealPolicyCost(const std::vector<double>& deficits,
                            double capacity, double first_price, double voll,
                            bool nonnegative = true);

// Convenience for a scenario: nonnegative when stage 1 buys.
IdealResult IdealPolicyCost(const Scenario& scenario,
                            const std::vector<double>& deficits);

struct SamplePath {
  std::vector<double> revisions;  // e_2 .. e_{R+1}
  std::vector<double> deficits;   // D_1 .. D_T
};

// Deterministic in (seed, run).
SamplePath SampleScenarioPath(const Scenario& scenario, uint64_t seed,
                              uint64_t run);

struct PolicyResult {
  std::vector<double> purchases;  // s_r
  std::vector<double> positions;  // x_{r+1} after each stage
  double x_final = 0.0;           // x_{R+1}
  double purchase_cost = 0.0;
  double delivery_cost = 0.0;
  double total_cost = 0.0;
};

PolicyResult SimulatePolicy(const ThresholdSchedule& schedule,
                            const Scenario& scenario, const SamplePath& path);

}  // namespace rld

#endif  // RLD_DISPATCH_H_
