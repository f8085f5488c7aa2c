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

#include "rld/lattice.h"

#include <algorithm>
#include <cmath>

#include "rld/csv.h"
#include "rld/errors.h"
#include "rld/gaussian.h"

namespace rld {

Lattice BuildLattice(const ForecastModel& forecast, double capacity, double x) {
  forecast.Validate();
  if (!(capacity > 0.0)) {
    throw DomainError("lattice needs capacity > 0; use the B = 0 closed form");
  }
  Lattice lattice;
  lattice.forecast = forecast;
  lattice.capacity = capacity;
  lattice.x = x;
  const int T = forecast.T();
  lattice.levels.resize(T);
  for (int t = 1; t <= T; ++t) {
    const int K = 2 * t - 1;
    auto& level = lattice.levels[t - 1];
    level.resize(K);
    for (int k = 1; k <= K; ++k) {
      LatticeNode& node = level[k - 1];
      node.t = t;
      node.k = k;
      node.depth = std::min(k - 1, K - k);
      node.from_full = k > t;
      node.start = t - node.depth;
      double eff = forecast.d_hat[t - 1];
      double var = 0.0;
      for (int m = node.start; m < t; ++m) {
        eff -= x - forecast.d_hat[m - 1];
      }
      for (int m = node.start; m <= t; ++m) {
        var += forecast.sigma[m - 1] * forecast.sigma[m - 1];
      }
      if (node.from_full) eff -= capacity;
      node.d_hat_eff = eff;
      node.error_variance = var;
    }
  }
  return lattice;
}

ChainBounds NodeChainBounds(const Lattice& lattice, const LatticeNode& node) {
  const auto& f = lattice.forecast;
  const double x = lattice.x;
  const double B = lattice.capacity;
  ChainBounds b;
  double stored = node.from_full ? B : 0.0;
  for (int m = node.start; m <= node.t; ++m) {
    const double eff = f.d_hat[m - 1] - stored;
    b.step_stds.push_back(f.sigma[m - 1]);
    b.d_hat_eff.push_back(eff);
    b.lower.push_back(x - B - eff);
    b.upper.push_back(x - eff);
    stored += x - f.d_hat[m - 1];
  }
  return b;
}

NodeProbabilities NodeTransitionProbs(const Lattice& lattice,
                                      const LatticeNode& node,
                                      double boundary_p) {
  const ChainBounds b = NodeChainBounds(lattice, node);
  const size_t n = b.step_stds.size();
  NodeProbabilities out;
  if (n == 1) {
    out.p = boundary_p;
  } else {
    const std::span<const double> s(b.step_stds.data(), n - 1);
    const std::span<const double> lo(b.lower.data(), n - 1);
    const std::span<const double> hi(b.upper.data(), n - 1);
    out.p = boundary_p * WalkRectangleProb(s, lo, hi, FinalMode::kInterval);
  }
  out.p_left = boundary_p * WalkRectangleProb(b.step_stds, b.lower, b.upper,
                                              FinalMode::kUpperTail);
  out.p_mid = boundary_p * WalkRectangleProb(b.step_stds, b.lower, b.upper,
                                             FinalMode::kInterval);
  out.p_right = boundary_p * WalkRectangleProb(b.step_stds, b.lower, b.upper,
                                               FinalMode::kLowerTail);
  if (out.p_left > 0.0) {
    const double mean = TruncatedWalkMean(b.step_stds, b.lower, b.upper,
                                          FinalMode::kUpperTail);
    out.shortfall = out.p_left * (b.d_hat_eff.back() + mean - lattice.x);
  }
  return out;
}

LatticeSolution AssembleChains(int T, double capacity, double voll,
                               const ChainWalker& walker, bool stationary,
                               bool keep_nodes) {
  LatticeSolution sol;
  sol.p_empty.assign(T, 0.0);
  sol.p_full.assign(T, 0.0);
  sol.p_empty[0] = 1.0;
  if (keep_nodes) {
    sol.nodes.resize(T);
    for (int t = 1; t <= T; ++t) sol.nodes[t - 1].resize(2 * t - 1);
  }

  ChainProfile empty_chain;
  ChainProfile full_chain;
  if (stationary) {
    empty_chain = walker(0.0, 0, T);
    if (T > 1) full_chain = walker(capacity, 1, T - 1);
  }

  const double scale = voll / T;
  for (int j = 0; j < T; ++j) {
    for (int side = 0; side < 2; ++side) {
      const bool full = side == 1;
      if (full && j == 0) continue;
      const double start_p = full ? sol.p_full[j] : sol.p_empty[j];
      if (start_p == 0.0 && !keep_nodes) continue;
      const int length = T - j;
      ChainProfile local;
      const ChainProfile* chain = nullptr;
      if (stationary) {
        chain = full ? &full_chain : &empty_chain;
      } else {
        local = walker(full ? capacity : 0.0, j, length);
        chain = &local;
      }
      for (int n = 0; n < length && n < chain->size(); ++n) {
        const int t = j + n;  // 0-based stage
        const double left = start_p * chain->left[n];
        const double right = start_p * chain->right[n];
        sol.cost += voll * start_p * chain->shortfall[n];
        sol.subgradient -= scale * (n + 1) * left;
        if (t + 1 < T) {
          sol.p_empty[t + 1] += left;
          sol.p_full[t + 1] += right;
        }
        if (keep_nodes) {
          const int K = 2 * (t + 1) - 1;
          const int k = full ? K - n : n + 1;
          NodeProbabilities& np = sol.nodes[t][k - 1];
          np.p = start_p * (n == 0 ? 1.0 : chain->mid[n - 1]);
          np.p_left = left;
          np.p_mid = start_p * chain->mid[n];
          np.p_right = right;
          np.shortfall = start_p * chain->shortfall[n];
        }
      }
    }
  }
  return sol;
}

LatticeSolution SolveLattice(const ForecastModel& forecast, double capacity,
                             double x_total, double voll, bool keep_nodes) {
  forecast.Validate();
  if (!(capacity > 0.0)) throw DomainError("lattice needs capacity > 0");
  const int T = forecast.T();
  const double x = x_total / T;
  std::vector<double> drifts(T);
  for (int t = 0; t < T; ++t) drifts[t] = x - forecast.d_hat[t];
  const std::vector<double>& stds = forecast.sigma;
  const ChainWalker walker = [&](double start, int first, int length) {
    return GaussianChainWalk(
        start, std::span<const double>(drifts).subspan(first, length),
        std::span<const double>(stds).subspan(first, length), capacity);
  };
  return AssembleChains(T, capacity, voll, walker, forecast.constant_profile(),
                        keep_nodes);
}

LatticeSolution SolveLatticeDiscrete(std::span<const double> d_hat,
                                     std::span<const double> atoms,
                                     std::span<const double> probs,
                                     double capacity, double x_total,
                                     double voll) {
  if (!(capacity > 0.0)) throw DomainError("lattice needs capacity > 0");
  const int T = static_cast<int>(d_hat.size());
  const double x = x_total / T;
  std::vector<double> drifts(T);
  for (int t = 0; t < T; ++t) drifts[t] = x - d_hat[t];
  const bool stationary =
      std::all_of(d_hat.begin(), d_hat.end(),
                  [&](double d) { return d == d_hat[0]; });
  const ChainWalker walker = [&](double start, int first, int length) {
    return DiscreteChainWalk(
        start, std::span<const double>(drifts).subspan(first, length), atoms,
        probs, capacity);
  };
  return AssembleChains(T, capacity, voll, walker, stationary, false);
}

TerminalValue ClosedFormB0(double x_total, const ForecastModel& forecast,
                           double voll) {
  forecast.Validate();
  const int T = forecast.T();
  const double x = x_total / T;
  TerminalValue v;
  double tail = 0.0;
  for (int t = 0; t < T; ++t) {
    const double d = forecast.d_hat[t];
    const double s = forecast.sigma[t];
    if (s == 0.0) {
      v.cost += std::max(d - x, 0.0);
      tail += d > x ? 1.0 : (d == x ? 0.5 : 0.0);
      continue;
    }
    const double z = (x - d) / s;
    v.cost += s * NormalPdf(z) - (x - d) * NormalCdf(-z);
    tail += NormalCdf(-z);
  }
  v.cost *= voll;
  v.subgradient = -voll * tail / T;
  return v;
}

TerminalValue LatticeTerminal(double x_total, const ForecastModel& forecast,
                              double capacity, double voll) {
  if (capacity < 0.0) throw DomainError("negative storage capacity");
  if (capacity == 0.0) return ClosedFormB0(x_total, forecast, voll);
  const LatticeSolution s = SolveLattice(forecast, capacity, x_total, voll);
  return {s.cost, s.subgradient};
}

double LatticeTerminalCost(double x_total, const ForecastModel& forecast,
                           double capacity, double voll) {
  return LatticeTerminal(x_total, forecast, capacity, voll).cost;
}

double LatticeTerminalSubgradient(double x_total, const ForecastModel& forecast,
                                  double capacity, double voll) {
  return LatticeTerminal(x_total, forecast, capacity, voll).subgradient;
}

void WriteLatticeCsv(const Lattice& lattice, const LatticeSolution& solution,
                     std::ostream& out) {
  if (static_cast<int>(solution.nodes.size()) != lattice.T()) {
    throw DomainError("lattice dump needs per-node probabilities");
  }
  out << "t,k,d_hat_eff,depth,p,p_left,p_mid,p_right\n";
  for (const auto& level : lattice.levels) {
    for (const LatticeNode& node : level) {
      const NodeProbabilities& p = solution.nodes[node.t - 1][node.k - 1];
      out << csv::JoinRow({std::to_string(node.t), std::to_string(node.k),
                           csv::FormatDouble(node.d_hat_eff),
                           std::to_string(node.depth), csv::FormatDouble(p.p),
                           csv::FormatDouble(p.p_left),
                           csv::FormatDouble(p.p_mid),
                           csv::FormatDouble(p.p_right)})
          << '\n';
    }
  }
}

}  // namespace rld
