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


// Backward dynamic programming over the offset y = x - F_r for a buy-only
// ladder, by value functions on a uniform grid. Independent of the nested
// first-purchase subgradient form used by the solver.

#ifndef RLD_TESTS_GRID_DP_H_
#define RLD_TESTS_GRID_DP_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace rld::testing {

struct DpStage {
  double price = 0.0;
  double revision_sd = 0.0;  // revealed after this stage
};

class GridDp {
 public:
  GridDp(double lo, double hi, double step) : lo_(lo), step_(step) {
    n_ = static_cast<int>(std::lround((hi - lo) / step)) + 1;
  }

  // Optimal order-up-to offsets for every stage, given the terminal
  // expected cost J(y).
  std::vector<double> Solve(const std::vector<DpStage>& stages,
                            const std::function<double(double)>& terminal) {
    const int R = static_cast<int>(stages.size());
    std::vector<double> offsets(R);
    // Value after stage r+1 as a function of grid index; starts terminal.
    std::function<double(long)> next = [&](long i) { return terminal(z(i)); };
    std::vector<double> W(n_), V(n_);
    for (int r = R - 1; r >= 0; --r) {
      Smooth(next, stages[r].revision_sd, &W);
      const double c = stages[r].price;
      int best = 0;
      for (int i = 1; i < n_; ++i) {
        if (c * z(i) + W[i] < c * z(best) + W[best]) best = i;
      }
      double delta = z(best);
      if (best > 0 && best + 1 < n_) {
        const double a = c * z(best - 1) + W[best - 1];
        const double b = c * z(best) + W[best];
        const double d = c * z(best + 1) + W[best + 1];
        const double curv = a - 2.0 * b + d;
        if (curv > 0.0) delta += 0.5 * step_ * (a - d) / curv;
      }
      offsets[r] = delta;
      const double w_at = W[best];
      for (int i = 0; i < n_; ++i) {
        V[i] = i <= best ? c * (z(best) - z(i)) + w_at : W[i];
      }
      const std::vector<double> table = V;
      const double top = V[n_ - 1];
      next = [this, table, c, best, w_at, top](long i) {
        if (i < 0) return c * (z(best) - z(i)) + w_at;
        if (i >= n_) return top;
        return table[i];
      };
    }
    return offsets;
  }

 private:
  double z(long i) const { return lo_ + step_ * static_cast<double>(i); }

  // out[i] = E[f(i - e/step)] for e ~ N(0, sd^2) on the grid lattice.
  void Smooth(const std::function<double(long)>& f, double sd,
              std::vector<double>* out) const {
    if (sd == 0.0) {
      for (int i = 0; i < n_; ++i) (*out)[i] = f(i);
      return;
    }
    const long m = static_cast<long>(std::ceil(9.0 * sd / step_));
    std::vector<double> w(2 * m + 1);
    double total = 0.0;
    for (long j = -m; j <= m; ++j) {
      const double e = step_ * static_cast<double>(j) / sd;
      w[j + m] = std::exp(-0.5 * e * e);
      total += w[j + m];
    }
    std::vector<double> values(n_ + 2 * m);
    for (long k = 0; k < n_ + 2 * m; ++k) values[k] = f(k - m);
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (long j = -m; j <= m; ++j) acc += w[j + m] * values[i - j + m];
      (*out)[i] = acc / total;
    }
  }

  double lo_;
  double step_;
  int n_;
};

}  // namespace rld::testing

#endif  // RLD_TESTS_GRID_DP_H_
