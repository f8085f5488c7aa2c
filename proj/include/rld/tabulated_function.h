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

#ifndef RLD_TABULATED_FUNCTION_H_
#define RLD_TABULATED_FUNCTION_H_

#include <functional>
#include <vector>

namespace rld {

// Monotone piecewise-cubic Hermite interpolant of a tabulated function.
// Outside the table the end values are held constant.
class TabulatedFunction {
 public:
  TabulatedFunction() = default;
  // Nodes must be strictly increasing; at least two.
  TabulatedFunction(std::vector<double> x, std::vector<double> y);

  // Uniform nodes.
  static TabulatedFunction Uniform(const std::function<double(double)>& f,
                                   double lo, double hi, int nodes);
  // Starts from `initial_nodes` uniform nodes and bisects every interval
  // whose midpoint value misses the interpolant by more than `abs_tol`,
  // until none does or `max_nodes` is reached.
  static TabulatedFunction Adaptive(const std::function<double(double)>& f,
                                    double lo, double hi, double abs_tol,
                                    int initial_nodes, int max_nodes);

  double operator()(double x) const;
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }

 private:
  void ComputeSlopes();

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> d_;
};

}  // namespace rld

#endif  // RLD_TABULATED_FUNCTION_H_
