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

#include "rld/threshold_recursion.h"

#include <cmath>
#include <limits>

#include "rld/errors.h"
#include "rld/gaussian.h"
#include "rld/rng.h"

namespace rld {

RootResult BracketedRoot(const std::function<double(double)>& f, double center,
                         double scale, double tolerance) {
  if (!(scale > 0.0)) scale = 1e-6;
  RootResult best;
  best.residual = std::numeric_limits<double>::infinity();
  int evals = 0;
  auto eval = [&](double x) {
    const double v = f(x);
    ++evals;
    if (std::abs(v) < std::abs(best.residual)) {
      best.root = x;
      best.residual = v;
    }
    return v;
  };

  double step = scale;
  double lo = center - step;
  double hi = center + step;
  double f_lo = eval(lo);
  double f_hi = eval(hi);
  for (int i = 0; f_lo > 0.0; ++i) {
    if (i == 200) throw SolverError("threshold equation has no root below");
    hi = lo;
    f_hi = f_lo;
    step *= 2.0;
    lo = center - step;
    f_lo = eval(lo);
  }
  for (int i = 0; f_hi < 0.0; ++i) {
    if (i == 200) throw SolverError("threshold equation has no root above");
    lo = hi;
    f_lo = f_hi;
    step *= 2.0;
    hi = center + step;
    f_hi = eval(hi);
  }
  if (std::abs(best.residual) <= tolerance) {
    best.iterations = evals;
    return best;
  }
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double fm = eval(mid);
    if (std::abs(fm) <= tolerance) break;
    if (fm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  best.iterations = evals;
  return best;
}

NestedObjective::NestedObjective(const std::vector<NestedStage>& stages, int r,
                                 const std::vector<double>& later_offsets,
                                 const std::function<double(double)>& terminal,
                                 const NestedOptions& options)
    : terminal_(terminal) {
  const int R = static_cast<int>(stages.size());
  if (r < 1 || r > R) throw DomainError("stage index outside the ladder");
  later_.assign(stages.begin() + r, stages.end());
  later_offsets_ = later_offsets;
  if (later_offsets_.size() != later_.size()) {
    throw DomainError("need one offset per later stage");
  }
  dims_ = R - r + 1;
  std::vector<double> sd(dims_);
  double var = 0.0;
  for (int d = 0; d < dims_; ++d) {
    sd[d] = stages[r - 1 + d].revision_sd;
    var += sd[d] * sd[d];
  }
  total_sd_ = std::sqrt(var);
  samples_ = var > 0.0 ? options.samples : 1;
  cumulative_.assign(static_cast<size_t>(samples_) * dims_, 0.0);
  if (var == 0.0) return;
  const ShiftedHalton halton(dims_, options.seed);
  std::vector<double> u(dims_);
  for (int s = 0; s < samples_; ++s) {
    halton.Point(s, u.data());
    double acc = 0.0;
    for (int d = 0; d < dims_; ++d) {
      acc += sd[d] == 0.0 ? 0.0 : sd[d] * NormalQuantile(u[d]);
      cumulative_[static_cast<size_t>(s) * dims_ + d] = acc;
    }
  }
}

double NestedObjective::operator()(double delta) const {
  const int later = static_cast<int>(later_.size());
  double acc = 0.0;
  for (int s = 0; s < samples_; ++s) {
    const double* e = &cumulative_[static_cast<size_t>(s) * dims_];
    bool traded = false;
    for (int m = 0; m < later; ++m) {
      const double thr = later_offsets_[m] + e[m];
      const bool trade = later_[m].direction == Direction::kBuy ? delta < thr
                                                                 : delta > thr;
      if (trade) {
        acc -= later_[m].price;
        traded = true;
        break;
      }
    }
    if (!traded) acc += terminal_(delta - e[dims_ - 1]);
  }
  return acc / samples_;
}

NestedSolution SolveNestedThresholds(
    const std::vector<NestedStage>& stages,
    const std::function<double(double)>& terminal, double voll,
    const NestedOptions& options) {
  const int R = static_cast<int>(stages.size());
  if (R == 0) throw DomainError("empty ladder");
  NestedSolution sol;
  sol.offsets.assign(R, 0.0);
  sol.residuals.assign(R, 0.0);
  sol.iterations.assign(R, 0);
  const double tol = options.tolerance * voll;
  for (int r = R; r >= 1; --r) {
    const std::vector<double> later(sol.offsets.begin() + r, sol.offsets.end());
    const NestedObjective grad(stages, r, later, terminal, options);
    const double price = stages[r - 1].price;
    const auto f = [&](double delta) { return price + grad(delta); };
    const double scale = std::max(grad.total_sd(), 1e-6);
    const RootResult root = BracketedRoot(f, 0.0, scale, tol);
    sol.offsets[r - 1] = root.root;
    sol.residuals[r - 1] = root.residual;
    sol.iterations[r - 1] = root.iterations;
  }
  return sol;
}

}  // namespace rld
