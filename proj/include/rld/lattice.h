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

// Expected delivery cost of an ideal storage device on the recombinant
// lattice of effective deficits.
//
// Delivery stage t (1-based) has K_t = 2t - 1 nodes. Node k = 1 is reached
// when the device enters stage t empty, node k = K_t when it enters full.
// An interior node is reached after h = min(k - 1, K_t - k) consecutive
// stages strictly inside [0, B] since the last boundary visit; k <= t
// belongs to a chain that left the empty boundary, k > t to one that left
// the full boundary. Each chain is a Gaussian walk of the storage level, so
// all node probabilities of one chain come out of a single forward
// recursion.
//
// x_total is the accumulated purchase position x_{R+1}; the per-stage supply
// is x = x_total / T.

#ifndef RLD_LATTICE_H_
#define RLD_LATTICE_H_

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "rld/core_model.h"
#include "rld/walk_quadrature.h"

namespace rld {

struct LatticeNode {
  int t = 1;                  // delivery stage, 1-based
  int k = 1;                  // 1..K_t
  int depth = 0;              // h
  bool from_full = false;     // chain left the full boundary
  int start = 1;              // stage of the chain's boundary node, t - h
  double d_hat_eff = 0.0;     // predicted effective deficit
  double error_variance = 0.0;
};

struct Lattice {
  ForecastModel forecast;
  double capacity = 0.0;
  double x = 0.0;  // per-stage supply
  std::vector<std::vector<LatticeNode>> levels;

  int T() const { return static_cast<int>(levels.size()); }
  const LatticeNode& node(int t, int k) const { return levels.at(t - 1).at(k - 1); }
};

// Throws DomainError unless capacity > 0.
Lattice BuildLattice(const ForecastModel& forecast, double capacity, double x);

// Walk of the error partial sums along the chain ending at `node`: one entry
// per stage start..t, bounds (x - B - D_eff, x - D_eff].
struct ChainBounds {
  std::vector<double> step_stds;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> d_hat_eff;
};
ChainBounds NodeChainBounds(const Lattice& lattice, const LatticeNode& node);

struct NodeProbabilities {
  double p = 0.0;
  double p_left = 0.0;   // visit, then shortfall (device empties)
  double p_mid = 0.0;
  double p_right = 0.0;  // visit, then curtailment (device fills)
  double shortfall = 0.0;  // E[unserved energy at this node; left]
};

// Node probabilities from the rectangle-probability engine, given the
// probability of the chain's boundary node.
NodeProbabilities NodeTransitionProbs(const Lattice& lattice,
                                      const LatticeNode& node,
                                      double boundary_p);

// Produces the exit profile of a chain entering stage `first` (0-based) at
// level `start` and running `length` stages.
using ChainWalker =
    std::function<ChainProfile(double start, int first, int length)>;

struct LatticeSolution {
  double cost = 0.0;
  double subgradient = 0.0;  // d cost / d x_total
  std::vector<double> p_empty;  // P(enter stage t empty), t = 1..T
  std::vector<double> p_full;
  // Per-node probabilities, filled when requested.
  std::vector<std::vector<NodeProbabilities>> nodes;
};

// Chain bookkeeping shared by all step laws. With `stationary` set, the
// walker's output depends on the start level only and chains are reused by
// truncation.
LatticeSolution AssembleChains(int T, double capacity, double voll,
                               const ChainWalker& walker, bool stationary,
                               bool keep_nodes);

// Gaussian per-stage errors from `forecast`. Requires capacity > 0.
LatticeSolution SolveLattice(const ForecastModel& forecast, double capacity,
                             double x_total, double voll,
                             bool keep_nodes = false);

// The same recursion with every stage error drawn from a discrete law.
LatticeSolution SolveLatticeDiscrete(std::span<const double> d_hat,
                                     std::span<const double> atoms,
                                     std::span<const double> probs,
                                     double capacity, double x_total,
                                     double voll);

struct TerminalValue {
  double cost = 0.0;
  double subgradient = 0.0;
};

// B = 0: c sum_t E[(D_t - x)_+] and -(c / T) sum_t P(D_t > x).
TerminalValue ClosedFormB0(double x_total, const ForecastModel& forecast,
                           double voll);

// Lattice value for capacity > 0, closed form for capacity == 0.
TerminalValue LatticeTerminal(double x_total, const ForecastModel& forecast,
                              double capacity, double voll);
double LatticeTerminalCost(double x_total, const ForecastModel& forecast,
                           double capacity, double voll);
double LatticeTerminalSubgradient(double x_total, const ForecastModel& forecast,
                                  double capacity, double voll);

// CSV `t,k,d_hat_eff,depth,p,p_left,p_mid,p_right`; `solution` must carry
// node probabilities.
void WriteLatticeCsv(const Lattice& lattice, const LatticeSolution& solution,
                     std::ostream& out);

}  // namespace rld

#endif  // RLD_LATTICE_H_
