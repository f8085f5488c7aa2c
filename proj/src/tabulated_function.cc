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

#include "rld/tabulated_function.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "rld/errors.h"

namespace rld {

TabulatedFunction::TabulatedFunction(std::vector<double> x,
                                     std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() < 2 || x_.size() != y_.size()) {
    throw DomainError("tabulated function needs >= 2 matching nodes");
  }
  for (size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw DomainError("tabulated nodes must increase strictly");
    }
  }
  ComputeSlopes();
}

void TabulatedFunction::ComputeSlopes() {
  const size_t n = x_.size();
  std::vector<double> h(n - 1), delta(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
    return;
  }
  // Second-order centered slopes, limited so each piece stays monotone.
  for (size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    const double d =
        (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
    const double cap =
        3.0 * std::min(std::abs(delta[i - 1]), std::abs(delta[i]));
    d_[i] = std::abs(d) > cap ? std::copysign(cap, d) : d;
  }
  auto end_slope = [](double h0, double h1, double del0, double del1) {
    double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d * del0 <= 0.0) return 0.0;
    if (del0 * del1 <= 0.0 && std::abs(d) > std::abs(3.0 * del0)) {
      return 3.0 * del0;
    }
    return d;
  };
  d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double TabulatedFunction::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const size_t i =
      std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
         (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * d_[i + 1];
}

TabulatedFunction TabulatedFunction::Uniform(
    const std::function<double(double)>& f, double lo, double hi, int nodes) {
  if (nodes < 2 || !(hi > lo)) throw DomainError("bad tabulation range");
  std::vector<double> x(nodes), y(nodes);
  for (int i = 0; i < nodes; ++i) {
    x[i] = i + 1 == nodes ? hi : lo + (hi - lo) * i / (nodes - 1);
    y[i] = f(x[i]);
  }
  return TabulatedFunction(std::move(x), std::move(y));
}

TabulatedFunction TabulatedFunction::Adaptive(
    const std::function<double(double)>& f, double lo, double hi,
    double abs_tol, int initial_nodes, int max_nodes) {
  std::map<double, double> known;
  const TabulatedFunction start = Uniform(f, lo, hi, initial_nodes);
  for (size_t i = 0; i < start.x_.size(); ++i) known[start.x_[i]] = start.y_[i];
  std::map<double, double> probes;
  TabulatedFunction table = start;
  while (static_cast<int>(known.size()) < max_nodes) {
    std::vector<std::pair<double, double>> inserts;
    for (size_t i = 0; i + 1 < table.x_.size(); ++i) {
      const double mid = 0.5 * (table.x_[i] + table.x_[i + 1]);
      if (!(mid > table.x_[i] && mid < table.x_[i + 1])) continue;
      auto it = probes.find(mid);
      const double value = it != probes.end() ? it->second : f(mid);
      probes[mid] = value;
      if (std::abs(value - table(mid)) > abs_tol) inserts.emplace_back(mid, value);
    }
    if (inserts.empty()) break;
    for (const auto& [x, y] : inserts) {
      if (static_cast<int>(known.size()) >= max_nodes) break;
      known[x] = y;
    }
    std::vector<double> xs, ys;
    xs.reserve(known.size());
    ys.reserve(known.size());
    for (const auto& [x, y] : known) {
      xs.push_back(x);
      ys.push_back(y);
    }
    table = TabulatedFunction(std::move(xs), std::move(ys));
  }
  return table;
}

}  // namespace rld
