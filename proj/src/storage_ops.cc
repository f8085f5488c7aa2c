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

#include "rld/storage_ops.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rld/csv.h"
#include "rld/errors.h"

namespace rld {

double BoundaryTolerance(double capacity) {
  return 1e-12 * std::max(capacity, 1.0);
}

double OptimalStorageAction(double b, double deficit, double x,
                            const StorageSpec& spec) {
  const double B = spec.capacity;
  const double tol = BoundaryTolerance(B);
  if (!(b >= -tol && b <= B + tol)) {
    throw DomainError("storage level " + std::to_string(b) +
                      " outside [0, " + std::to_string(B) + "]");
  }
  if (B == 0.0) return 0.0;
  b = std::clamp(b, 0.0, B);
  const double mu = spec.recharge_efficiency;
  const double room = mu > 0.0 ? (B - b) / mu
                               : std::numeric_limits<double>::infinity();
  const double charge = std::min(std::max(x - deficit, 0.0), room);
  const double discharge =
      std::min(std::max(deficit - x, 0.0), spec.discharge_efficiency * b);
  return charge - discharge;
}

double StepStorage(double b, double u, const StorageSpec& spec) {
  const double B = spec.capacity;
  const double tol = BoundaryTolerance(B);
  const double mu = spec.recharge_efficiency;
  const double nu = spec.discharge_efficiency;
  const double up = std::max(u, 0.0);
  const double down = std::min(u, 0.0);
  if (!(b >= -tol && b <= B + tol)) {
    throw DomainError("storage level outside [0, B]");
  }
  if (mu > 0.0 && up > (B - b) / mu + tol) {
    throw DomainError("recharge exceeds free capacity");
  }
  if (down < -nu * b - tol) {
    throw DomainError("discharge exceeds usable stored energy");
  }
  const double drawn = down == 0.0 ? 0.0 : down / nu;
  const double next = spec.storage_efficiency * (b + mu * up + drawn);
  return std::clamp(next, 0.0, B);
}

PathOutcome SimulateDelivery(std::span<const double> deficits, double x,
                             const StorageSpec& spec, const CostModel& cost) {
  const size_t T = deficits.size();
  PathOutcome out;
  out.x = x;
  out.deficit.assign(deficits.begin(), deficits.end());
  out.action.resize(T);
  out.level.resize(T + 1);
  out.unserved.resize(T);
  out.V.resize(T);
  out.Q.resize(T);

  double b = 0.0;
  double v = 0.0;
  double q = 0.0;
  out.level[0] = b;
  for (size_t t = 0; t < T; ++t) {
    const double u = OptimalStorageAction(b, deficits[t], x, spec);
    const double net = deficits[t] - x + u;
    out.action[t] = u;
    out.unserved[t] = std::max(net, 0.0);
    v += out.unserved[t];
    q += std::min(net, 0.0);
    out.V[t] = v;
    out.Q[t] = q;
    b = StepStorage(b, u, spec);
    out.level[t + 1] = b;
  }
  out.cost = cost.voll * v;
  return out;
}

double IdealDeliveryShortfall(std::span<const double> deficits, double x,
                              double capacity) {
  double b = 0.0;
  double v = 0.0;
  for (double d : deficits) {
    const double next = b + x - d;
    if (next < 0.0) {
      v -= next;
      b = 0.0;
    } else {
      b = std::min(next, capacity);
    }
  }
  return v;
}

VqReport ReformulateVq(const PathOutcome& outcome, const StorageSpec& spec) {
  if (!spec.ideal()) {
    throw DomainError("V/Q reformulation requires ideal storage");
  }
  const int T = outcome.T();
  const double B = spec.capacity;
  const double tol = BoundaryTolerance(B);
  VqReport report;
  report.V.resize(T);
  report.Q.resize(T);
  double v = 0.0;
  double q = 0.0;
  double cumulative_net = 0.0;
  double scale = 1.0;
  for (int t = 0; t < T; ++t) {
    const double net = outcome.deficit[t] - outcome.x + outcome.action[t];
    const double dv = std::max(net, 0.0);
    const double dq = std::min(net, 0.0);
    v += dv;
    q += dq;
    report.V[t] = v;
    report.Q[t] = q;
    const double after = outcome.level[t + 1];
    const std::string at = "t=" + std::to_string(t + 1);
    if (dv > tol && after > tol) {
      report.violations.push_back(at + ": V increased with storage not empty");
    }
    if (dq < -tol && after < B - tol) {
      report.violations.push_back(at + ": Q decreased with storage not full");
    }
    if (dv > tol && dq < -tol) {
      report.violations.push_back(at + ": V and Q moved together");
    }
    cumulative_net += outcome.deficit[t] - outcome.x;
    scale += std::abs(outcome.deficit[t]) + std::abs(outcome.x);
    const double identity = -cumulative_net + v + q;
    if (std::abs(identity - after) > 1e-12 * scale) {
      report.violations.push_back(at + ": b_{t+1} != -sum(D - x) + V + Q");
    }
  }
  return report;
}

double PerPathSubgradientEstimate(std::span<const double> deficits, double x,
                                  double capacity, double voll) {
  const double tol = BoundaryTolerance(capacity);
  double b = 0.0;
  long weight = 0;
  int depth = 0;
  for (double d : deficits) {
    const double next = b + x - d;
    if (next < 0.0) {
      weight += depth + 1;
      b = 0.0;
      depth = 0;
    } else if (next >= capacity - tol) {
      b = capacity;
      depth = 0;
    } else if (next <= tol) {
      b = next;
      depth = 0;
    } else {
      b = next;
      ++depth;
    }
  }
  const double T = static_cast<double>(deficits.size());
  return -voll * static_cast<double>(weight) / T;
}

void WritePathCsv(const PathOutcome& o, std::ostream& out) {
  out << "t,D_t,u_t,b_t,unserved,V,Q\n";
  for (int t = 0; t < o.T(); ++t) {
    out << csv::JoinRow({std::to_string(t + 1), csv::FormatDouble(o.deficit[t]),
                         csv::FormatDouble(o.action[t]),
                         csv::FormatDouble(o.level[t]),
                         csv::FormatDouble(o.unserved[t]),
                         csv::FormatDouble(o.V[t]), csv::FormatDouble(o.Q[t])})
        << '\n';
  }
}

}  // namespace rld
