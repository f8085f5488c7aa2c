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

// Monte Carlo benchmark of dispatch policies against the perfect-foresight
// ideal, with common random numbers across policies.

#ifndef RLD_HARNESS_H_
#define RLD_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "rld/core_model.h"
#include "rld/dispatch.h"

namespace rld {

struct BenchmarkRow {
  std::string policy;
  double D = 0.0;  // interval deficit forecast
  double B = 0.0;
  int n_runs = 0;
  double mean_cost = 0.0;
  double stderr_cost = 0.0;
  double integration_cost = 0.0;  // mean of J_policy - J_ideal per run
  double wall_ms = 0.0;

  // Not persisted.
  double integration_stderr = 0.0;
  int dominance_violations = 0;  // runs with J_policy < J_ideal
  std::vector<double> run_costs;
};

struct BenchmarkTable {
  std::vector<BenchmarkRow> rows;

  const BenchmarkRow* Find(const std::string& policy, double D, double B) const;
};

struct BenchmarkOptions {
  // Any of ideal, 3sigma, lattice, mc, ct.
  std::vector<std::string> policies{"ideal", "3sigma", "lattice", "ct"};
  int n_runs = 2000;
  uint64_t seed = 1;
  SolverOptions solver;
  bool record_wall_time = true;
  bool keep_run_costs = false;
};

BenchmarkTable RunBenchmark(const Scenario& scenario,
                            const BenchmarkOptions& options);

enum class SweepAxis { kD, kB };
SweepAxis ParseSweepAxis(const std::string& name);

// One benchmark per grid value; grid point i uses seed + i.
BenchmarkTable Sweep(const Scenario& scenario, SweepAxis axis,
                     const std::vector<double>& grid,
                     const BenchmarkOptions& options);

// CSV `policy,D,B,n_runs,mean_cost,stderr,integration_cost,wall_ms`.
void WriteBenchmarkCsv(const BenchmarkTable& table, std::ostream& out);
BenchmarkTable ParseBenchmarkCsv(const std::string& text);

// One CSV per policy, `<dir>/<policy>.csv` with columns
// `x,mean_cost,stderr,integration_cost`, x being the swept quantity.
std::vector<std::filesystem::path> WritePlotData(
    const BenchmarkTable& table, SweepAxis axis,
    const std::filesystem::path& dir);

// CSV `stage,lead_time,price,threshold,engine,residual`.
void WriteThresholdCsv(const ThresholdSchedule& schedule, std::ostream& out);

}  // namespace rld

#endif  // RLD_HARNESS_H_
