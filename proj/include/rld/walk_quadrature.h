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

// Probabilities of Gaussian random walks confined to rectangles.
//
// S_j = e_1 + ... + e_j with independent e_i ~ N(0, s_i^2). The generic
// routines propagate the sub-density of S_j through the intervals
// (lower_j, upper_j] on a quadrature grid; the last step is integrated in
// closed form. The chain walkers specialize the same recursion to the
// storage level W of an ideal device, which lives on the fixed interval
// [0, B] and is therefore handled with a single Toeplitz kernel per step.

#ifndef RLD_WALK_QUADRATURE_H_
#define RLD_WALK_QUADRATURE_H_

#include <span>
#include <vector>

namespace rld {

enum class FinalMode {
  kInterval,   // lower_n < S_n <= upper_n
  kUpperTail,  // S_n > upper_n
  kLowerTail,  // S_n <= lower_n
};

// P(lower_j < S_j <= upper_j for j < n, final condition on S_n).
// Bounds may be infinite. Zero-width intervals give 0; zero step stds
// propagate deterministically.
double WalkRectangleProb(std::span<const double> step_stds,
                         std::span<const double> lower,
                         std::span<const double> upper, FinalMode final_mode);

// E[S_n | event] for the same event. Throws DomainError when the event has
// zero probability.
double TruncatedWalkMean(std::span<const double> step_stds,
                         std::span<const double> lower,
                         std::span<const double> upper, FinalMode final_mode);

// Per-step exit statistics of an ideal storage level started at a boundary.
// Step n (0-based) maps W to W + drift_n - e_n. Entries are unconditional
// probabilities of the chain: left = first exit below 0 at step n (a
// shortfall), right = first exit above B (curtailment), mid = still inside
// [0, B] after step n, shortfall = E[-W'; exit below 0 at step n].
struct ChainProfile {
  std::vector<double> left;
  std::vector<double> mid;
  std::vector<double> right;
  std::vector<double> shortfall;
  // Quadrature mass of the propagated sub-density entering step n; entry 0
  // is 1. Agrees with mid[n-1] up to quadrature error.
  std::vector<double> entering;

  int size() const { return static_cast<int>(left.size()); }
};

// Gaussian steps with per-step drift and std. All stds must be positive, or
// all zero (deterministic walk).
ChainProfile GaussianChainWalk(double start, std::span<const double> drifts,
                               std::span<const double> stds, double capacity);

// Discrete step errors: step n subtracts atoms[k] with probability probs[k].
ChainProfile DiscreteChainWalk(double start, std::span<const double> drifts,
                               std::span<const double> atoms,
                               std::span<const double> probs, double capacity);

// Grid intervals used by GaussianChainWalk for a level interval of width
// `capacity` and smallest step std `min_std`; even, at least 256.
int ChainGridIntervals(double capacity, double min_std);

}  // namespace rld

#endif  // RLD_WALK_QUADRATURE_H_
