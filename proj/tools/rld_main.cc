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

// rld: threshold solver, policy simulator and benchmark runner.
//
// Exit codes: 0 ok, 2 invalid input, 3 solver failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rld/core_model.h"
#include "rld/csv.h"
#include "rld/ct_approx.h"
#include "rld/dispatch.h"
#include "rld/errors.h"
#include "rld/harness.h"
#include "rld/lattice.h"
#include "rld/storage_ops.h"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitSolver = 3;

struct Common {
  std::string scenario;
  std::string out;
  std::string engine = "lattice";
  std::vector<std::string> policies{"ideal", "3sigma", "lattice", "ct"};
  int runs = 2000;
  uint64_t seed = 1;
  int grid_points = 0;
  int samples = 200000;
  bool no_wall_time = false;
};

// Writes to `path`, or stdout when empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw rld::ValidationError("out", "cannot open " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

rld::SolverOptions SolverFrom(const Common& c) {
  rld::SolverOptions o;
  o.nested.samples = c.samples;
  o.nested.seed = c.seed;
  if (c.grid_points > 0) {
    o.mc_table_nodes = c.grid_points;
    o.table_max_nodes = c.grid_points;
  }
  return o;
}

rld::BenchmarkOptions BenchmarkFrom(const Common& c) {
  rld::BenchmarkOptions o;
  o.policies = c.policies;
  o.n_runs = c.runs;
  o.seed = c.seed;
  o.solver = SolverFrom(c);
  o.record_wall_time = !c.no_wall_time;
  return o;
}

void AddScenario(CLI::App* app, Common* c) {
  app->add_option("--scenario", c->scenario, "Scenario JSON file")->required();
}

void AddOut(CLI::App* app, Common* c) {
  app->add_option("--out", c->out, "Output CSV path (default stdout)");
}

void AddSolver(CLI::App* app, Common* c) {
  app->add_option("--seed", c->seed, "Base seed");
  app->add_option("--grid-points", c->grid_points,
                  "Tabulation nodes of the terminal subgradient");
  app->add_option("--samples", c->samples,
                  "Quasi-Monte Carlo points per threshold equation");
}

void AddBenchmark(CLI::App* app, Common* c) {
  app->add_option("--policy", c->policies,
                  "Policies: ideal,3sigma,lattice,mc,ct")
      ->delimiter(',');
  app->add_option("--runs", c->runs, "Monte Carlo runs");
  app->add_flag("--no-wall-time", c->no_wall_time,
                "Write wall_ms = 0 so repeated runs are byte-identical");
}

std::vector<double> DefaultGrid(rld::SweepAxis axis) {
  if (axis == rld::SweepAxis::kD) {
    return {-0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8};
  }
  return {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk limiting dispatch with fast storage"};
  app.require_subcommand(1);
  Common c;

  auto* thresholds = app.add_subcommand("thresholds", "Solve stage thresholds");
  AddScenario(thresholds, &c);
  AddOut(thresholds, &c);
  AddSolver(thresholds, &c);
  thresholds->add_option("--engine", c.engine, "lattice|mc|ct|3sigma");
  std::string dump_lattice;
  double dump_x = 0.0;
  bool dump_x_set = false;
  thresholds->add_option("--dump-lattice", dump_lattice,
                         "Write the delivery lattice node table to this path");
  thresholds
      ->add_option_function<double>(
          "--x", [&](double v) { dump_x = v, dump_x_set = true; },
          "Position x_{R+1} for the lattice dump (default: last threshold)");

  auto* simulate = app.add_subcommand("simulate", "Simulate one policy");
  AddScenario(simulate, &c);
  AddOut(simulate, &c);
  AddSolver(simulate, &c);
  simulate->add_option("--engine", c.engine, "lattice|mc|ct|3sigma");
  simulate->add_option("--runs", c.runs, "Monte Carlo runs");
  std::string path_dump;
  simulate->add_option("--path-dump", path_dump,
                       "Write the storage trajectory of run 0 to this path");

  auto* benchmark = app.add_subcommand("benchmark", "Benchmark policies");
  AddScenario(benchmark, &c);
  AddOut(benchmark, &c);
  AddSolver(benchmark, &c);
  AddBenchmark(benchmark, &c);

  auto* sweep = app.add_subcommand("sweep", "Benchmark over a D or B grid");
  AddScenario(sweep, &c);
  AddOut(sweep, &c);
  AddSolver(sweep, &c);
  AddBenchmark(sweep, &c);
  std::string axis_name = "D";
  std::vector<double> grid;
  std::string plotdata;
  sweep->add_option("--axis", axis_name, "D or B");
  sweep->add_option("--grid", grid, "Comma-separated grid values")
      ->delimiter(',');
  sweep->add_option("--plotdata", plotdata,
                    "Directory for per-policy plot CSV files");

  auto* rbm = app.add_subcommand("rbm-table", "Long-run RBM boundary rates");
  AddOut(rbm, &c);
  std::vector<double> mus{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> sigmas{0.5, 1.0, 2.0};
  std::vector<double> barriers{0.5, 1.0, 2.0};
  rbm->add_option("--mu", mus, "Drifts")->delimiter(',');
  rbm->add_option("--sigma", sigmas, "Volatilities")->delimiter(',');
  rbm->add_option("--B", barriers, "Barriers")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*rbm) {
      Output out(c.out);
      out.stream() << "mu,sigma,B,v_rate,q_rate\n";
      for (double mu : mus) {
        for (double s : sigmas) {
          for (double b : barriers) {
            const rld::RbmRates r = rld::RbmLongRun({mu, s, b});
            out.stream() << rld::csv::JoinRow(
                                {rld::csv::FormatDouble(mu),
                                 rld::csv::FormatDouble(s),
                                 rld::csv::FormatDouble(b),
                                 rld::csv::FormatDouble(r.v_rate),
                                 rld::csv::FormatDouble(r.q_rate)})
                         << '\n';
          }
        }
      }
      return 0;
    }

    const rld::Scenario scenario = rld::LoadScenario(c.scenario);

    if (*thresholds) {
      const rld::Engine engine = rld::ParseEngine(c.engine);
      const rld::ThresholdSchedule schedule =
          rld::MakeSchedule(scenario, engine, SolverFrom(c));
      Output out(c.out);
      rld::WriteThresholdCsv(schedule, out.stream());
      if (!dump_lattice.empty()) {
        const double x_total =
            dump_x_set ? dump_x : schedule.stages.back().threshold;
        const rld::ForecastModel f = scenario.DeliveryForecast();
        const double B = scenario.storage.capacity;
        const rld::Lattice lattice = rld::BuildLattice(f, B, x_total / f.T());
        const rld::LatticeSolution sol =
            rld::SolveLattice(f, B, x_total, scenario.cost.voll, true);
        Output dump(dump_lattice);
        rld::WriteLatticeCsv(lattice, sol, dump.stream());
      }
      return 0;
    }

    if (*simulate) {
      const rld::Engine engine = rld::ParseEngine(c.engine);
      const rld::ThresholdSchedule schedule =
          rld::MakeSchedule(scenario, engine, SolverFrom(c));
      Output out(c.out);
      out.stream() << "run,x_final,purchase_cost,delivery_cost,total_cost,"
                      "ideal_cost\n";
      for (int i = 0; i < c.runs; ++i) {
        const rld::SamplePath path = rld::SampleScenarioPath(scenario, c.seed, i);
        const rld::PolicyResult r = rld::SimulatePolicy(schedule, scenario, path);
        const double ideal = rld::IdealPolicyCost(scenario, path.deficits).cost;
        out.stream() << rld::csv::JoinRow(
                            {std::to_string(i), rld::csv::FormatDouble(r.x_final),
                             rld::csv::FormatDouble(r.purchase_cost),
                             rld::csv::FormatDouble(r.delivery_cost),
                             rld::csv::FormatDouble(r.total_cost),
                             rld::csv::FormatDouble(ideal)})
                     << '\n';
        if (i == 0 && !path_dump.empty()) {
          const rld::PathOutcome o = rld::SimulateDelivery(
              path.deficits, r.x_final / scenario.T, scenario.storage,
              scenario.cost);
          Output dump(path_dump);
          rld::WritePathCsv(o, dump.stream());
        }
      }
      return 0;
    }

    if (*benchmark) {
      const rld::BenchmarkTable table =
          rld::RunBenchmark(scenario, BenchmarkFrom(c));
      Output out(c.out);
      rld::WriteBenchmarkCsv(table, out.stream());
      return 0;
    }

    if (*sweep) {
      const rld::SweepAxis axis = rld::ParseSweepAxis(axis_name);
      if (grid.empty()) grid = DefaultGrid(axis);
      const rld::BenchmarkTable table =
          rld::Sweep(scenario, axis, grid, BenchmarkFrom(c));
      Output out(c.out);
      rld::WriteBenchmarkCsv(table, out.stream());
      if (!plotdata.empty()) rld::WritePlotData(table, axis, plotdata);
      return 0;
    }
  } catch (const rld::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitInvalid;
  } catch (const rld::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitInvalid;
  } catch (const rld::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const rld::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return 0;
}
