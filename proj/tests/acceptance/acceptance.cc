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


// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rld/core_model.h"
#include "rld/ct_approx.h"
#include "rld/dispatch.h"
#include "rld/gaussian.h"
#include "rld/harness.h"
#include "rld/lattice.h"
#include "rld/rng.h"
#include "rld/storage_ops.h"

namespace rld {
namespace {

constexpr double kVoll = 1000.0;

struct Verdict {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

Scenario Default() {
  return LoadScenario(std::filesystem::path(RLD_DATA_DIR) /
                      "scenario_default.json");
}

// Within-interval forecast of the shipped scenario on T stages.
ForecastModel Interval(int T, double total_mean) {
  const double var = Default().DeliveryForecast().total_variance();
  return ForecastModel::Uniform(T, total_mean, var);
}

std::vector<double> OffsetGrid(double center, double sd, int points) {
  std::vector<double> x;
  for (int i = 0; i < points; ++i) {
    x.push_back(center + sd * (-2.0 + 4.0 * i / (points - 1)));
  }
  return x;
}

Verdict FlowBalance() {
  const auto start = std::chrono::steady_clock::now();
  const double mus[] = {-2.0, -1.0, -0.5, -0.1, -1e-9, 0.0, 1e-9, 0.1, 1.0, 3.0};
  double worst = 0.0;
  for (double mu : mus) {
    for (int i = 0; i < 10; ++i) {
      const double sigma = 0.05 * std::pow(1.6, i);
      for (int j = 0; j < 10; ++j) {
        const double B = 1e-3 * std::pow(3.0, j);
        const RbmRates r = RbmLongRun({mu, sigma, B});
        worst = std::max(worst, std::abs(mu + r.v_rate + r.q_rate));
      }
    }
  }
  const double secs = Seconds(start);
  Verdict v;
  v.detail = Fmt("max |mu + v + q| = %.3g over 1000 points, %.3f s", worst, secs);
  v.Require(worst < 1e-12, v.detail);
  v.Require(secs < 1.0, v.detail);
  return v;
}

Verdict RbmSimulation() {
  const auto start = std::chrono::steady_clock::now();
  const double delta = 1e-3;
  const long steps = 1000000;
  const double cases[3][3] = {{0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {-0.5, 2.0, 1.0}};
  Verdict v;
  std::string detail;
  for (int c = 0; c < 3; ++c) {
    const double mu = cases[c][0];
    const double sigma = cases[c][1];
    const double B = cases[c][2];
    const CounterRng rng(2024, c);
    double b = 0.0;
    double V = 0.0;
    for (long i = 0; i < steps; ++i) {
      b += mu * delta + sigma * std::sqrt(delta) * rng.Normal(i);
      if (b < 0.0) {
        V -= b;
        b = 0.0;
      } else if (b > B) {
        b = B;
      }
    }
    const double rate = V / (steps * delta);
    const double expect = RbmLongRun({mu, sigma, B}).v_rate;
    const double rel = rate / expect - 1.0;
    detail += Fmt("(%g,%g,%g): ", mu, sigma, B) + Fmt("rel %+.4f; ", rel);
    v.Require(std::abs(rel) < 0.02, "");
  }
  const double secs = Seconds(start);
  v.Require(secs < 30.0, "");
  v.detail = detail + Fmt("%.1f s", secs);
  return v;
}

// Terminal cost by plain simulation of the greedy storage recursion.
struct McCost {
  double mean;
  double se;
};

McCost SimulatedCost(const ForecastModel& f, double B, double x_total,
                     int paths, uint64_t seed) {
  const int T = f.T();
  const CounterRng rng(seed, 0);
  std::vector<double> d(T);
  double sum = 0.0;
  double sum2 = 0.0;
  for (int p = 0; p < paths; ++p) {
    for (int t = 0; t < T; ++t) {
      d[t] = f.d_hat[t] + f.sigma[t] * rng.Normal(static_cast<uint64_t>(p) * T + t);
    }
    const double cost = kVoll * IdealDeliveryShortfall(d, x_total / T, B);
    sum += cost;
    sum2 += cost * cost;
  }
  const double mean = sum / paths;
  const double var = (sum2 - paths * mean * mean) / (paths - 1);
  return {mean, std::sqrt(std::max(var, 0.0) / paths)};
}

Verdict LatticeVsMc() {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  double worst = 0.0;
  int points = 0;
  for (int T : {2, 5, 10, 20}) {
    for (double B : {0.001, 0.01}) {
      const ForecastModel f = Interval(T, 0.4);
      const double sd = std::sqrt(f.total_variance());
      for (double x : OffsetGrid(0.4, sd, 5)) {
        const double lattice = LatticeTerminalCost(x, f, B, kVoll);
        const McCost mc = SimulatedCost(f, B, x, 100000, 11 + T);
        const double z = std::abs(lattice - mc.mean) / mc.se;
        worst = std::max(worst, z);
        ++points;
        v.Require(z <= 3.0, Fmt("T=%g B=%g x=%g: |diff|/SE = %.2f", T, B, x, z));
      }
    }
  }
  const double secs = Seconds(start);
  v.Require(secs < 120.0, "");
  if (v.pass) {
    v.detail = Fmt("%g points, max |lattice - MC| / SE = %.2f, %.1f s", points,
                   worst, secs);
  }
  return v;
}

Verdict SubgradientCheck() {
  Verdict v;
  const double h = 1e-3;
  double worst = 0.0;
  for (int T : {2, 5, 10, 20}) {
    for (double B : {0.001, 0.01}) {
      const ForecastModel f = Interval(T, 0.4);
      const double sd = std::sqrt(f.total_variance());
      double prev = -kVoll;
      for (double x : OffsetGrid(0.4, sd, 5)) {
        const double g = LatticeTerminalSubgradient(x, f, B, kVoll);
        const double fd = (LatticeTerminalCost(x + h, f, B, kVoll) -
                           LatticeTerminalCost(x - h, f, B, kVoll)) /
                          (2.0 * h);
        const double rel = std::abs(g - fd) / std::abs(g);
        worst = std::max(worst, rel);
        v.Require(rel < 1e-2, Fmt("T=%g B=%g x=%g: relative FD error %.3g", T, B,
                                  x, rel));
        v.Require(g >= -kVoll && g <= 0.0,
                  Fmt("T=%g B=%g x=%g: subgradient %g out of bounds", T, B, x, g));
        v.Require(g >= prev, Fmt("T=%g B=%g x=%g: subgradient decreased", T, B, x));
        prev = g;
      }
    }
  }
  if (v.pass) v.detail = Fmt("max relative FD error %.3g over 40 points", worst);
  return v;
}

// E[(N(m, s^2) - x)_+] written with erfc.
double PartialExpectation(double m, double s, double x) {
  const double u = (m - x) / s;
  return (m - x) * 0.5 * std::erfc(-u / std::sqrt(2.0)) +
         s * std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
}

Verdict ClosedFormLimit() {
  Verdict v;
  double worst_limit = 0.0;
  double worst_oracle = 0.0;
  for (int T : {1, 5, 20}) {
    ForecastModel f = Interval(T, 0.4);
    for (int t = 0; t < T; ++t) f.d_hat[t] *= 1.0 + 0.3 * std::sin(t + 1.0);
    const double sd = std::sqrt(f.total_variance());
    for (double x : OffsetGrid(f.total_mean(), sd, 7)) {
      const double closed = ClosedFormB0(x, f, kVoll).cost;
      const double limit = LatticeTerminalCost(x, f, 1e-6, kVoll);
      double oracle = 0.0;
      for (int t = 0; t < T; ++t) {
        oracle += PartialExpectation(f.d_hat[t], f.sigma[t], x / T);
      }
      oracle *= kVoll;
      const double rl = std::abs(limit - closed) / closed;
      const double ro = std::abs(oracle - closed) / closed;
      worst_limit = std::max(worst_limit, rl);
      worst_oracle = std::max(worst_oracle, ro);
      v.Require(rl < 1e-3, Fmt("T=%g x=%g: B->0 relative gap %.3g", T, x, rl));
      v.Require(ro < 1e-10, Fmt("T=%g x=%g: oracle relative gap %.3g", T, x, ro));
    }
  }
  if (v.pass) {
    v.detail = Fmt("limit gap %.3g, oracle gap %.3g", worst_limit, worst_oracle);
  }
  return v;
}

Verdict BruteForce() {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  const double sigma = 0.05;
  std::vector<double> atoms(9);
  const std::vector<double> probs(9, 1.0 / 9.0);
  for (int k = 1; k <= 9; ++k) atoms[k - 1] = sigma * NormalQuantile((k - 0.5) / 9);
  const std::vector<double> d_hat = {0.12, 0.15, 0.13};
  double worst = 0.0;
  for (double B : {0.01, 0.05, 0.2}) {
    for (double x : {0.25, 0.4, 0.5}) {
      const double lattice =
          SolveLatticeDiscrete(d_hat, atoms, probs, B, x, kVoll).cost;
      double exact = 0.0;
      for (int a = 0; a < 9; ++a) {
        for (int b = 0; b < 9; ++b) {
          for (int c = 0; c < 9; ++c) {
            const std::vector<double> d = {d_hat[0] + atoms[a], d_hat[1] + atoms[b],
                                           d_hat[2] + atoms[c]};
            exact += IdealDeliveryShortfall(d, x / 3.0, B) / 729.0;
          }
        }
      }
      exact *= kVoll;
      const double gap = std::abs(lattice - exact);
      worst = std::max(worst, gap);
      v.Require(gap <= 1e-10, Fmt("B=%g x=%g: |lattice - enumeration| = %.3g", B,
                                  x, gap));
    }
  }
  const double secs = Seconds(start);
  v.Require(secs < 10.0, "");
  if (v.pass) v.detail = Fmt("max gap %.3g over 9 cases, %.3f s", worst, secs);
  return v;
}

Verdict ThresholdSanity() {
  Verdict v;
  ForecastModel f;
  f.d_hat = {0.4};
  f.sigma = {0.05};
  const auto G = [&](double psi) { return ClosedFormB0(psi, f, kVoll).subgradient; };
  const RootResult r = SolveStageThreshold(72, G, 0.4, 0.05, kVoll);
  const double expect = 0.05 * NormalQuantile(0.928);
  const double gap = std::abs(r.root - 0.4 - expect);
  v.Require(gap < 1e-4, Fmt("quantile gap %.3g", gap));
  double worst = 0.0;
  const Scenario s = Default();
  for (Engine e : {Engine::kLattice, Engine::kMc, Engine::kCt}) {
    const ThresholdSchedule sched = MakeSchedule(s, e);
    for (const StageThreshold& st : sched.stages) {
      worst = std::max(worst, std::abs(st.residual));
      v.Require(std::abs(st.residual) < 1e-6 * kVoll,
                std::string(EngineName(e)) +
                    Fmt(" stage %g residual %.3g", st.stage, st.residual));
    }
  }
  if (v.pass) {
    v.detail = Fmt("quantile gap %.3g, max stage residual %.3g", gap, worst);
  }
  return v;
}

double PairedSe(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  double m = 0.0;
  for (size_t i = 0; i < n; ++i) m += a[i] - b[i];
  m /= n;
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) ss += (a[i] - b[i] - m) * (a[i] - b[i] - m);
  return std::sqrt(ss / (n - 1) / n);
}

Verdict DeficitSweep() {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  BenchmarkOptions o;
  o.policies = {"ideal", "3sigma", "lattice", "ct"};
  o.n_runs = 2000;
  o.seed = 1;
  o.record_wall_time = false;
  o.keep_run_costs = true;
  std::vector<double> grid;
  for (int i = -4; i <= 4; ++i) grid.push_back(0.2 * i);
  const BenchmarkTable t = Sweep(Default().WithCapacity(0.001), SweepAxis::kD,
                                 grid, o);
  int violations = 0;
  double min_gap = 1e300;
  for (size_t i = 0; i < grid.size(); ++i) {
    const BenchmarkRow& three = t.rows[4 * i + 1];
    const BenchmarkRow& lat = t.rows[4 * i + 2];
    const BenchmarkRow& ct = t.rows[4 * i + 3];
    for (int k = 0; k < 4; ++k) violations += t.rows[4 * i + k].dominance_violations;
    const double se = PairedSe(ct.run_costs, lat.run_costs);
    v.Require(three.mean_cost >= lat.mean_cost,
              Fmt("D=%g: J_3sigma %.4f < J_lattice %.4f", grid[i], three.mean_cost,
                  lat.mean_cost));
    v.Require(ct.mean_cost >= lat.mean_cost - 3.0 * se,
              Fmt("D=%g: J_ct %.4f < J_lattice %.4f - 3 SE (%.3g)", grid[i],
                  ct.mean_cost, lat.mean_cost, se));
    min_gap = std::min(min_gap, (ct.mean_cost - lat.mean_cost) / std::max(se, 1e-300));
  }
  v.Require(violations == 0, Fmt("%g per-path dominance violations", violations));
  const double secs = Seconds(start);
  v.Require(secs < 600.0, Fmt("runtime %.0f s", secs));
  if (v.pass) {
    v.detail = Fmt("9 D points, min (J_ct - J_lattice)/SE = %.2f, 0 violations, "
                   "%.0f s",
                   min_gap, secs);
  }
  return v;
}

Verdict CapacityDirections() {
  Verdict v;
  const ForecastModel f = Default().DeliveryForecast();
  const double mean = f.total_mean();
  const double var = f.total_variance();
  for (double x : OffsetGrid(mean, std::sqrt(var), 9)) {
    const double ct_small = CtTerminalCost(x, mean, var, 0.001, kVoll);
    const double lat_small = LatticeTerminalCost(x, f, 0.001, kVoll);
    const double ct_big = CtTerminalCost(x, mean, var, 0.01, kVoll);
    const double lat_big = LatticeTerminalCost(x, f, 0.01, kVoll);
    v.Require(ct_small > lat_small, Fmt("B=0.001 x=%g: ct %.5g <= lattice %.5g", x,
                                        ct_small, lat_small));
    v.Require(ct_big < lat_big,
              Fmt("B=0.01 x=%g: ct %.5g >= lattice %.5g", x, ct_big, lat_big));
  }
  BenchmarkOptions o;
  o.policies = {"lattice", "ct"};
  o.n_runs = 2000;
  o.seed = 3;
  o.record_wall_time = false;
  const BenchmarkTable t =
      Sweep(Default().WithIntervalDeficit(0.4), SweepAxis::kB, {1e-4, 1e-1}, o);
  std::string summary;
  for (int i = 0; i < 2; ++i) {
    const BenchmarkRow& lat = t.rows[2 * i];
    const BenchmarkRow& ct = t.rows[2 * i + 1];
    v.Require(ct.mean_cost > lat.mean_cost,
              Fmt("B=%g: J_ct %.4f <= J_lattice %.4f", lat.B, ct.mean_cost,
                  lat.mean_cost));
    summary += Fmt("B=%g: J_ct - J_lattice = %.4f; ", lat.B,
                   ct.mean_cost - lat.mean_cost);
  }
  if (v.pass) v.detail = "terminal directions hold on 9 points; " + summary;
  return v;
}

Verdict ScalingLaw() {
  Verdict v;
  const double var = Default().DeliveryForecast().total_variance();
  const double B = 0.001;
  std::string detail;
  for (double alpha : {0.5, 2.0, 10.0}) {
    int mismatches = 0;
    int total = 0;
    for (int i = -50; i <= 50; ++i) {
      const double x = 0.4 + 0.003 * i;
      const double a = CtTerminalCost(x, 0.4, var, B, kVoll);
      const double b = CtTerminalCost(x, 0.4, alpha * var, alpha * B, kVoll);
      if (std::memcmp(&a, &b, sizeof a) != 0) ++mismatches;
      ++total;
    }
    detail += Fmt("alpha=%g: %g/%g bit mismatches; ", alpha, mismatches, total);
    v.Require(mismatches == 0, "");
  }
  v.detail = detail;
  return v;
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(RLD_CLI) + " " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict Determinism() {
  Verdict v;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("rld_acceptance_" + std::to_string(getpid()));
  std::filesystem::create_directories(dir);
  const std::string scenario =
      (std::filesystem::path(RLD_DATA_DIR) / "scenario_default.json").string();
  std::string outputs[2];
  for (int i = 0; i < 2; ++i) {
    const auto out = dir / ("bench" + std::to_string(i) + ".csv");
    const int code = RunCli("benchmark --scenario " + scenario +
                            " --runs 500 --seed 9 --no-wall-time --out " +
                            out.string());
    v.Require(code == 0, Fmt("benchmark exited with %g", code));
    outputs[i] = Slurp(out);
  }
  std::filesystem::remove_all(dir);
  v.Require(!outputs[0].empty() && outputs[0] == outputs[1],
            "benchmark CSV differs between invocations");
  if (v.pass) v.detail = Fmt("%g identical bytes", outputs[0].size());
  return v;
}

}  // namespace
}  // namespace rld

int main() {
  using rld::Verdict;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"RBM flow balance", rld::FlowBalance},
      {"RBM vs reflected walk", rld::RbmSimulation},
      {"lattice vs Monte Carlo", rld::LatticeVsMc},
      {"subgradient vs finite differences", rld::SubgradientCheck},
      {"B = 0 closed form", rld::ClosedFormLimit},
      {"brute-force enumeration", rld::BruteForce},
      {"threshold sanity", rld::ThresholdSanity},
      {"deficit sweep ordering", rld::DeficitSweep},
      {"capacity directions", rld::CapacityDirections},
      {"ct scaling law", rld::ScalingLaw},
      {"benchmark determinism", rld::Determinism},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failures;
    std::printf("ACC-%02zu %s  %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL",
                criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
