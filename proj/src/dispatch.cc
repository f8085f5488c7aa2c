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

#include "rld/dispatch.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "rld/ct_approx.h"
#include "rld/errors.h"
#include "rld/lattice.h"
#include "rld/rng.h"
#include "rld/storage_ops.h"
#include "rld/tabulated_function.h"

namespace rld {

const char* EngineName(Engine engine) {
  switch (engine) {
    case Engine::kLattice:
      return "lattice";
    case Engine::kMc:
      return "mc";
    case Engine::kCt:
      return "ct";
    case Engine::kThreeSigma:
      return "3sigma";
  }
  return "?";
}

Engine ParseEngine(const std::string& name) {
  if (name == "lattice") return Engine::kLattice;
  if (name == "mc") return Engine::kMc;
  if (name == "ct") return Engine::kCt;
  if (name == "3sigma") return Engine::kThreeSigma;
  throw ParseError("unknown engine '" + name + "'");
}

double DispatchDecision(double x, double psi, Direction direction) {
  if (direction == Direction::kBuy) return std::max(psi - x, 0.0);
  return std::min(psi - x, 0.0);
}

RootResult SolveStageThreshold(double price,
                               const std::function<double(double)>& subgradient,
                               double center, double scale, double voll) {
  if (!(price > 0.0 && price < voll)) {
    throw SolverError("stage price must lie strictly between 0 and the VOLL");
  }
  return BracketedRoot([&](double psi) { return price + subgradient(psi); },
                       center, scale, 1e-6 * voll);
}

namespace {

double WithinVariance(const Scenario& s) {
  return DeliveryVarianceSplit(s.curve, s.ladder, s.mean_share).within_variance;
}

std::vector<NestedStage> NestedStages(const Scenario& s) {
  const std::vector<double> rv = s.RevisionVariances();
  std::vector<NestedStage> stages(s.ladder.size());
  for (int r = 1; r <= s.ladder.size(); ++r) {
    stages[r - 1].price = s.ladder.stage(r).price;
    stages[r - 1].direction = s.ladder.stage(r).direction;
    stages[r - 1].revision_sd = std::sqrt(rv[r - 1]);
  }
  return stages;
}

ThresholdSchedule ScheduleSkeleton(const Scenario& s, Engine engine) {
  ThresholdSchedule schedule;
  schedule.engine = engine;
  schedule.stages.resize(s.ladder.size());
  for (int r = 1; r <= s.ladder.size(); ++r) {
    StageThreshold& st = schedule.stages[r - 1];
    st.stage = r;
    st.lead_time_hours = s.ladder.stage(r).lead_time_hours;
    st.price = s.ladder.stage(r).price;
    st.direction = s.ladder.stage(r).direction;
  }
  return schedule;
}

}  // namespace

double TerminalOffsetRange(const Scenario& scenario) {
  const double sd = std::sqrt(WithinVariance(scenario) * scenario.T);
  return std::max(8.0 * sd, 1e-6);
}

std::function<double(double)> TerminalSubgradient(
    const Scenario& scenario, Engine engine, const SolverOptions& options) {
  const ForecastModel forecast = scenario.DeliveryForecast();
  const double F = scenario.interval_deficit();
  const double B = scenario.storage.capacity;
  const double c = scenario.cost.voll;
  const double range = TerminalOffsetRange(scenario);
  switch (engine) {
    case Engine::kLattice: {
      if (!scenario.storage.ideal()) {
        throw DomainError("lattice engine requires ideal storage");
      }
      auto raw = [=](double y) {
        return LatticeTerminalSubgradient(F + y, forecast, B, c);
      };
      auto table = std::make_shared<TabulatedFunction>(
          TabulatedFunction::Adaptive(raw, -range, range,
                                      options.table_tolerance * c,
                                      options.table_initial_nodes,
                                      options.table_max_nodes));
      return [table](double y) { return (*table)(y); };
    }
    case Engine::kMc: {
      const int T = scenario.T;
      const int n = options.mc_paths;
      auto paths = std::make_shared<std::vector<double>>(
          static_cast<size_t>(n) * T);
      for (int i = 0; i < n; ++i) {
        const CounterRng rng(options.mc_seed,
                             (kSampleStream << 32) | static_cast<uint64_t>(i));
        for (int t = 0; t < T; ++t) {
          (*paths)[static_cast<size_t>(i) * T + t] =
              forecast.d_hat[t] + forecast.sigma[t] * rng.Normal(t);
        }
      }
      auto raw = [=](double y) {
        const double x = (F + y) / T;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += PerPathSubgradientEstimate(
              std::span<const double>(paths->data() + static_cast<size_t>(i) * T,
                                      T),
              x, B, c);
        }
        return acc / n;
      };
      auto table = std::make_shared<TabulatedFunction>(
          TabulatedFunction::Uniform(raw, -range, range, options.mc_table_nodes));
      return [table](double y) { return (*table)(y); };
    }
    case Engine::kCt: {
      const double var = WithinVariance(scenario);
      if (!(B > 0.0) || !(var > 0.0)) {
        throw DomainError("ct engine needs B > 0 and positive delivery variance");
      }
      return [=](double y) { return CtTerminalSubgradient(F + y, F, var, B, c); };
    }
    case Engine::kThreeSigma:
      break;
  }
  throw DomainError("3sigma rule has no terminal subgradient");
}

ThresholdSchedule SolveThresholdsBackward(const Scenario& scenario,
                                          Engine engine,
                                          const SolverOptions& options) {
  ValidateScenario(scenario);
  if (engine == Engine::kThreeSigma) return ThreeSigmaSchedule(scenario);
  const auto G = TerminalSubgradient(scenario, engine, options);
  const NestedSolution sol = SolveNestedThresholds(
      NestedStages(scenario), G, scenario.cost.voll, options.nested);
  ThresholdSchedule schedule = ScheduleSkeleton(scenario, engine);
  const double F = scenario.interval_deficit();
  for (size_t r = 0; r < schedule.stages.size(); ++r) {
    schedule.stages[r].offset = sol.offsets[r];
    schedule.stages[r].threshold = sol.offsets[r] + F;
    schedule.stages[r].residual = sol.residuals[r];
    schedule.stages[r].iterations = sol.iterations[r];
  }
  return schedule;
}

ThresholdSchedule SolveCtThresholds(const Scenario& scenario,
                                    const SolverOptions& options) {
  return SolveThresholdsBackward(scenario, Engine::kCt, options);
}

ThresholdSchedule ThreeSigmaSchedule(const Scenario& scenario) {
  ThresholdSchedule schedule = ScheduleSkeleton(scenario, Engine::kThreeSigma);
  const double F = scenario.interval_deficit();
  for (StageThreshold& st : schedule.stages) {
    st.offset = 3.0 * scenario.curve.sigma_at(st.lead_time_hours);
    st.threshold = st.offset + F;
  }
  return schedule;
}

ThresholdSchedule MakeSchedule(const Scenario& scenario, Engine engine,
                               const SolverOptions& options) {
  if (engine == Engine::kThreeSigma) return ThreeSigmaSchedule(scenario);
  return SolveThresholdsBackward(scenario, engine, options);
}

IdealResult IdealPolicyCost(const std::vector<double>& deficits,
                            double capacity, double first_price, double voll,
                            bool nonnegative) {
  if (deficits.empty()) throw DomainError("empty deficit path");
  const double T = static_cast<double>(deficits.size());
  auto cost = [&](double x) {
    return first_price * T * x + voll * IdealDeliveryShortfall(deficits, x, capacity);
  };
  auto slope = [&](double x) {
    return first_price * T + T * PerPathSubgradientEstimate(deficits, x, capacity, voll);
  };
  double lo = *std::min_element(deficits.begin(), deficits.end()) - 1.0;
  double hi = *std::max_element(deficits.begin(), deficits.end()) + 1.0;
  if (nonnegative) {
    lo = std::max(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  if (slope(lo) >= 0.0) return {lo, cost(lo)};
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (slope(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double c_lo = cost(lo);
  const double c_hi = cost(hi);
  return c_lo <= c_hi ? IdealResult{lo, c_lo} : IdealResult{hi, c_hi};
}

IdealResult IdealPolicyCost(const Scenario& scenario,
                            const std::vector<double>& deficits) {
  if (!scenario.storage.ideal()) {
    throw DomainError("ideal policy is defined for ideal storage");
  }
  const MarketStage& first = scenario.ladder.stage(1);
  return IdealPolicyCost(deficits, scenario.storage.capacity, first.price,
                         scenario.cost.voll,
                         first.direction == Direction::kBuy);
}

SamplePath SampleScenarioPath(const Scenario& scenario, uint64_t seed,
                              uint64_t run) {
  const std::vector<double> rv = scenario.RevisionVariances();
  const int R = static_cast<int>(rv.size());
  const int T = scenario.T;
  const double within_sd =
      std::sqrt(DeliveryVarianceSplit(scenario.curve, scenario.ladder,
                                      scenario.mean_share)
                    .within_variance /
                T);
  const CounterRng rng(seed, (kPathStream << 32) | (run & 0xffffffffULL));
  SamplePath path;
  path.revisions.resize(R);
  double shift = 0.0;
  for (int i = 0; i < R; ++i) {
    path.revisions[i] = std::sqrt(rv[i]) * rng.Normal(i);
    shift += path.revisions[i];
  }
  path.deficits.resize(T);
  for (int t = 0; t < T; ++t) {
    path.deficits[t] = scenario.d_hat[t] + shift / T + within_sd * rng.Normal(R + t);
  }
  return path;
}

PolicyResult SimulatePolicy(const ThresholdSchedule& schedule,
                            const Scenario& scenario, const SamplePath& path) {
  const int R = scenario.ladder.size();
  if (static_cast<int>(schedule.stages.size()) != R ||
      static_cast<int>(path.revisions.size()) != R ||
      static_cast<int>(path.deficits.size()) != scenario.T) {
    throw DomainError("schedule, scenario and path dimensions differ");
  }
  PolicyResult out;
  double F = scenario.interval_deficit();
  double x = 0.0;
  for (int r = 1; r <= R; ++r) {
    if (r >= 2) F += path.revisions[r - 2];
    const double psi = schedule.Threshold(r, F);
    const double s = DispatchDecision(x, psi, scenario.ladder.stage(r).direction);
    out.purchases.push_back(s);
    out.purchase_cost += scenario.ladder.stage(r).price * s;
    x += s;
    out.positions.push_back(x);
  }
  out.x_final = x;
  const double per_stage = x / scenario.T;
  if (scenario.storage.ideal()) {
    out.delivery_cost = scenario.cost.voll *
                        IdealDeliveryShortfall(path.deficits, per_stage,
                                               scenario.storage.capacity);
  } else {
    out.delivery_cost =
        SimulateDelivery(path.deficits, per_stage, scenario.storage, scenario.cost)
            .cost;
  }
  out.total_cost = out.purchase_cost + out.delivery_cost;
  return out;
}

}  // namespace rld
