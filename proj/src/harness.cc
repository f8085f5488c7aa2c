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

#include "rld/harness.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include "rld/csv.h"
#include "rld/errors.h"

namespace rld {
namespace {

const std::vector<std::string> kBenchmarkHeader = {
    "policy", "D", "B", "n_runs", "mean_cost", "stderr", "integration_cost",
    "wall_ms"};

void MeanAndStderr(const std::vector<double>& v, double* mean, double* se) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  *mean = m;
  *se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

template <typename Fn>
auto Tagged(const std::string& policy, Fn&& fn) {
  try {
    return fn();
  } catch (const SolverError& e) {
    throw SolverError("policy " + policy + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError("policy " + policy + ": " + e.what());
  }
}

}  // namespace

const BenchmarkRow* BenchmarkTable::Find(const std::string& policy, double D,
                                         double B) const {
  for (const BenchmarkRow& row : rows) {
    if (row.policy == policy && row.D == D && row.B == B) return &row;
  }
  return nullptr;
}

BenchmarkTable RunBenchmark(const Scenario& scenario,
                            const BenchmarkOptions& options) {
  ValidateScenario(scenario);
  if (options.n_runs < 1) throw ValidationError("runs", "must be at least 1");
  const int n = options.n_runs;
  std::vector<SamplePath> paths(n);
  std::vector<double> ideal(n);
  for (int i = 0; i < n; ++i) {
    paths[i] = SampleScenarioPath(scenario, options.seed, i);
  }

  using Clock = std::chrono::steady_clock;
  const auto ideal_start = Clock::now();
  for (int i = 0; i < n; ++i) {
    ideal[i] = IdealPolicyCost(scenario, paths[i].deficits).cost;
  }
  const double ideal_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - ideal_start)
          .count();

  BenchmarkTable table;
  for (const std::string& policy : options.policies) {
    BenchmarkRow row;
    row.policy = policy;
    row.D = scenario.interval_deficit();
    row.B = scenario.storage.capacity;
    row.n_runs = n;
    std::vector<double> costs(n);
    const auto start = Clock::now();
    double elapsed = 0.0;
    if (policy == "ideal") {
      costs = ideal;
      elapsed = ideal_ms;
    } else {
      const Engine engine = ParseEngine(policy);
      const ThresholdSchedule schedule = Tagged(policy, [&] {
        return MakeSchedule(scenario, engine, options.solver);
      });
      for (int i = 0; i < n; ++i) {
        costs[i] = SimulatePolicy(schedule, scenario, paths[i]).total_cost;
      }
      elapsed =
          std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
    std::vector<double> excess(n);
    for (int i = 0; i < n; ++i) {
      excess[i] = costs[i] - ideal[i];
      const double tol = 1e-9 * std::max(1.0, std::abs(ideal[i]));
      if (excess[i] < -tol) ++row.dominance_violations;
    }
    MeanAndStderr(costs, &row.mean_cost, &row.stderr_cost);
    MeanAndStderr(excess, &row.integration_cost, &row.integration_stderr);
    row.wall_ms = options.record_wall_time ? elapsed : 0.0;
    if (options.keep_run_costs) row.run_costs = std::move(costs);
    table.rows.push_back(std::move(row));
  }
  return table;
}

SweepAxis ParseSweepAxis(const std::string& name) {
  if (name == "D") return SweepAxis::kD;
  if (name == "B") return SweepAxis::kB;
  throw ParseError("unknown sweep axis '" + name + "'");
}

BenchmarkTable Sweep(const Scenario& scenario, SweepAxis axis,
                     const std::vector<double>& grid,
                     const BenchmarkOptions& options) {
  if (grid.empty()) throw ValidationError("grid", "must be nonempty");
  BenchmarkTable table;
  for (size_t i = 0; i < grid.size(); ++i) {
    const Scenario point = axis == SweepAxis::kD
                               ? scenario.WithIntervalDeficit(grid[i])
                               : scenario.WithCapacity(grid[i]);
    BenchmarkOptions o = options;
    o.seed = options.seed + i;
    BenchmarkTable part = RunBenchmark(point, o);
    for (BenchmarkRow& row : part.rows) table.rows.push_back(std::move(row));
  }
  return table;
}

void WriteBenchmarkCsv(const BenchmarkTable& table, std::ostream& out) {
  out << csv::JoinRow(kBenchmarkHeader) << '\n';
  for (const BenchmarkRow& r : table.rows) {
    out << csv::JoinRow({r.policy, csv::FormatDouble(r.D),
                         csv::FormatDouble(r.B), std::to_string(r.n_runs),
                         csv::FormatDouble(r.mean_cost),
                         csv::FormatDouble(r.stderr_cost),
                         csv::FormatDouble(r.integration_cost),
                         csv::FormatDouble(r.wall_ms)})
        << '\n';
  }
}

BenchmarkTable ParseBenchmarkCsv(const std::string& text) {
  const csv::Table t = csv::Parse(text);
  if (t.header != kBenchmarkHeader) {
    throw ParseError("unexpected benchmark CSV header");
  }
  BenchmarkTable table;
  for (const auto& f : t.rows) {
    BenchmarkRow r;
    r.policy = f[0];
    r.D = csv::ParseDouble(f[1], "D");
    r.B = csv::ParseDouble(f[2], "B");
    const double runs = csv::ParseDouble(f[3], "n_runs");
    r.n_runs = static_cast<int>(runs);
    if (r.n_runs != runs || r.n_runs < 1) throw ParseError("bad n_runs");
    r.mean_cost = csv::ParseDouble(f[4], "mean_cost");
    r.stderr_cost = csv::ParseDouble(f[5], "stderr");
    r.integration_cost = csv::ParseDouble(f[6], "integration_cost");
    r.wall_ms = csv::ParseDouble(f[7], "wall_ms");
    table.rows.push_back(std::move(r));
  }
  return table;
}

std::vector<std::filesystem::path> WritePlotData(
    const BenchmarkTable& table, SweepAxis axis,
    const std::filesystem::path& dir) {
  if (table.rows.empty()) throw DomainError("empty benchmark table");
  std::filesystem::create_directories(dir);
  std::map<std::string, std::vector<const BenchmarkRow*>> by_policy;
  std::vector<std::string> order;
  for (const BenchmarkRow& r : table.rows) {
    if (!by_policy.count(r.policy)) order.push_back(r.policy);
    by_policy[r.policy].push_back(&r);
  }
  std::vector<std::filesystem::path> written;
  for (const std::string& policy : order) {
    const auto path = dir / (policy + ".csv");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "x,mean_cost,stderr,integration_cost\n";
    for (const BenchmarkRow* r : by_policy[policy]) {
      out << csv::JoinRow({csv::FormatDouble(axis == SweepAxis::kD ? r->D : r->B),
                           csv::FormatDouble(r->mean_cost),
                           csv::FormatDouble(r->stderr_cost),
                           csv::FormatDouble(r->integration_cost)})
          << '\n';
    }
    written.push_back(path);
  }
  return written;
}

void WriteThresholdCsv(const ThresholdSchedule& schedule, std::ostream& out) {
  out << "stage,lead_time,price,threshold,engine,residual\n";
  for (const StageThreshold& s : schedule.stages) {
    out << csv::JoinRow({std::to_string(s.stage),
                         csv::FormatDouble(s.lead_time_hours),
                         csv::FormatDouble(s.price),
                         csv::FormatDouble(s.threshold),
                         EngineName(schedule.engine),
                         csv::FormatDouble(s.residual)})
        << '\n';
  }
}

}  // namespace rld
