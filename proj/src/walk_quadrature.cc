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

#include "rld/walk_quadrature.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rld/errors.h"
#include "rld/gaussian.h"

namespace rld {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Support of a Gaussian is truncated at this many standard deviations.
constexpr double kSupportSds = 8.5;
constexpr int kMinIntervals = 256;
constexpr int kMaxIntervals = 1 << 15;
// Grid spacing relative to the narrowest kernel it has to resolve.
constexpr double kPointsPerSd = 16.0;

int EvenIntervals(double width, double resolve_sd) {
  double n = kMinIntervals;
  if (resolve_sd > 0.0) n = std::max(n, std::ceil(kPointsPerSd * width / resolve_sd));
  int m = static_cast<int>(std::min<double>(n, kMaxIntervals));
  return m + (m & 1);
}

// Composite Simpson weights for `intervals` (even) panels of width h.
std::vector<double> SimpsonWeights(int intervals, double h) {
  std::vector<double> q(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    q[i] = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    q[i] *= h / 3.0;
  }
  return q;
}

// Either a point mass or a sub-density tabulated on a uniform grid.
struct WalkState {
  bool point = true;
  double value = 0.0;
  double weight = 1.0;
  std::vector<double> x;
  std::vector<double> f;
  std::vector<double> q;

  double lo() const { return point ? value : x.front(); }
  double hi() const { return point ? value : x.back(); }
  bool empty() const { return point ? weight == 0.0 : x.empty(); }
};

WalkState EmptyState() {
  WalkState s;
  s.weight = 0.0;
  return s;
}

void MakeGrid(double lo, double hi, double resolve_sd, WalkState* s) {
  const int n = EvenIntervals(hi - lo, resolve_sd);
  const double h = (hi - lo) / n;
  s->point = false;
  s->x.resize(n + 1);
  for (int i = 0; i <= n; ++i) s->x[i] = lo + h * i;
  s->x[n] = hi;
  s->q = SimpsonWeights(n, h);
  s->f.assign(n + 1, 0.0);
}

double Interpolate(const WalkState& s, double at) {
  const auto& x = s.x;
  if (at < x.front() || at > x.back()) return 0.0;
  const double h = (x.back() - x.front()) / (x.size() - 1);
  size_t i = std::min<size_t>(static_cast<size_t>((at - x.front()) / h),
                              x.size() - 2);
  const double t = (at - x[i]) / h;
  return s.f[i] * (1.0 - t) + s.f[i + 1] * t;
}

// Restricts the state to (lo, hi] without adding noise.
WalkState Restrict(const WalkState& s, double lo, double hi,
                   double resolve_sd) {
  if (s.point) {
    if (s.value > lo && s.value <= hi) return s;
    return EmptyState();
  }
  const double a = std::max(lo, s.lo());
  const double b = std::min(hi, s.hi());
  if (!(b > a)) return EmptyState();
  WalkState out;
  MakeGrid(a, b, resolve_sd, &out);
  for (size_t i = 0; i < out.x.size(); ++i) out.f[i] = Interpolate(s, out.x[i]);
  return out;
}

// Adds an N(0, sd^2) step and restricts to (lo, hi] with the support
// clipped to `support_sd` standard deviations of the cumulative sum.
WalkState Propagate(const WalkState& s, double sd, double lo, double hi,
                    double cumulative_sd, double resolve_sd) {
  if (sd == 0.0) return Restrict(s, lo, hi, resolve_sd);
  const double a = std::max({lo, s.lo() - kSupportSds * sd,
                             -kSupportSds * cumulative_sd});
  const double b = std::min({hi, s.hi() + kSupportSds * sd,
                             kSupportSds * cumulative_sd});
  if (!(b > a)) return EmptyState();
  WalkState out;
  MakeGrid(a, b, resolve_sd > 0.0 ? std::min(sd, resolve_sd) : sd, &out);
  if (s.point) {
    for (size_t i = 0; i < out.x.size(); ++i) {
      out.f[i] = s.weight * NormalPdf((out.x[i] - s.value) / sd) / sd;
    }
    return out;
  }
  for (size_t j = 0; j < out.x.size(); ++j) {
    double acc = 0.0;
    for (size_t i = 0; i < s.x.size(); ++i) {
      const double z = (out.x[j] - s.x[i]) / sd;
      if (std::abs(z) > kSupportSds + 1.0) continue;
      acc += s.q[i] * s.f[i] * NormalPdf(z);
    }
    out.f[j] = acc / sd;
  }
  return out;
}

struct FinalSet {
  double lo;  // event is lo < y <= hi
  double hi;
};

FinalSet MakeFinalSet(double lower, double upper, FinalMode mode) {
  switch (mode) {
    case FinalMode::kInterval:
      return {lower, upper};
    case FinalMode::kUpperTail:
      return {upper, kInf};
    case FinalMode::kLowerTail:
      return {-kInf, lower};
  }
  return {lower, upper};
}

// P(y in set) and E[y 1{y in set}] for y ~ N(m, sd^2), sd > 0.
void GaussianSetMoments(double m, double sd, const FinalSet& set, double* p,
                        double* first) {
  const double cdf_hi = set.hi == kInf ? 1.0 : NormalCdf((set.hi - m) / sd);
  const double cdf_lo = set.lo == -kInf ? 0.0 : NormalCdf((set.lo - m) / sd);
  *p = cdf_hi - cdf_lo;
  const double m_hi = set.hi == kInf ? m : LowerFirstMoment(m, sd, set.hi);
  const double m_lo = set.lo == -kInf ? 0.0 : LowerFirstMoment(m, sd, set.lo);
  *first = m_hi - m_lo;
}

struct WalkMoments {
  double p = 0.0;
  double first = 0.0;
};

WalkMoments RunWalk(std::span<const double> step_stds,
                    std::span<const double> lower,
                    std::span<const double> upper, FinalMode final_mode) {
  const size_t n = step_stds.size();
  if (n == 0 || lower.size() != n || upper.size() != n) {
    throw DomainError("walk bounds must have one entry per step");
  }
  for (size_t j = 0; j < n; ++j) {
    if (!(step_stds[j] >= 0.0)) throw DomainError("negative step std");
  }
  for (size_t j = 0; j + 1 < n; ++j) {
    if (!(upper[j] > lower[j])) return {};
  }
  if (final_mode == FinalMode::kInterval && !(upper[n - 1] > lower[n - 1])) {
    return {};
  }

  WalkState state;  // S_0 = 0
  double cumulative_var = 0.0;
  for (size_t j = 0; j + 1 < n; ++j) {
    cumulative_var += step_stds[j] * step_stds[j];
    double resolve = 0.0;
    for (double s : {step_stds[j], step_stds[j + 1]}) {
      if (s > 0.0) resolve = resolve == 0.0 ? s : std::min(resolve, s);
    }
    state = Propagate(state, step_stds[j], lower[j], upper[j],
                      std::sqrt(cumulative_var), resolve);
    if (state.empty()) return {};
  }

  const FinalSet set = MakeFinalSet(lower[n - 1], upper[n - 1], final_mode);
  const double sd = step_stds[n - 1];
  WalkMoments out;
  if (state.point) {
    if (sd == 0.0) {
      if (state.value > set.lo && state.value <= set.hi) {
        out.p = state.weight;
        out.first = state.weight * state.value;
      }
      return out;
    }
    double p, first;
    GaussianSetMoments(state.value, sd, set, &p, &first);
    return {state.weight * p, state.weight * first};
  }
  if (sd == 0.0) {
    const WalkState in = Restrict(state, set.lo, set.hi, 0.0);
    if (in.empty()) return out;
    if (in.point) return {in.weight, in.weight * in.value};
    for (size_t i = 0; i < in.x.size(); ++i) {
      out.p += in.q[i] * in.f[i];
      out.first += in.q[i] * in.f[i] * in.x[i];
    }
    return out;
  }
  for (size_t i = 0; i < state.x.size(); ++i) {
    double p, first;
    GaussianSetMoments(state.x[i], sd, set, &p, &first);
    out.p += state.q[i] * state.f[i] * p;
    out.first += state.q[i] * state.f[i] * first;
  }
  return out;
}

// Exit statistics of one storage step from level w: W' = w + a - e with
// e ~ N(0, tau^2), tau > 0.
struct StepExit {
  double left;
  double mid;
  double right;
  double shortfall;
};

StepExit ExitFrom(double w, double a, double tau, double capacity) {
  const double m = w + a;
  StepExit e;
  e.left = NormalCdf(-m / tau);
  e.right = NormalCdf((m - capacity) / tau);
  e.mid = NormalCdf(m / tau) - NormalCdf((m - capacity) / tau);
  e.shortfall = UpperPartialExpectation(0.0, tau, m);
  return e;
}

void ResizeProfile(int n, ChainProfile* p) {
  p->left.assign(n, 0.0);
  p->mid.assign(n, 0.0);
  p->right.assign(n, 0.0);
  p->shortfall.assign(n, 0.0);
  p->entering.assign(n, 0.0);
}

ChainProfile DeterministicChain(double start, std::span<const double> drifts,
                                double capacity) {
  ChainProfile p;
  const int n = static_cast<int>(drifts.size());
  ResizeProfile(n, &p);
  double w = start;
  for (int k = 0; k < n; ++k) {
    p.entering[k] = 1.0;
    w += drifts[k];
    if (w < 0.0) {
      p.left[k] = 1.0;
      p.shortfall[k] = -w;
      return p;
    }
    if (w > capacity) {
      p.right[k] = 1.0;
      return p;
    }
    p.mid[k] = 1.0;
  }
  return p;
}

// Mass below which a chain is treated as extinct.
constexpr double kExtinct = 1e-18;

}  // namespace

double WalkRectangleProb(std::span<const double> step_stds,
                         std::span<const double> lower,
                         std::span<const double> upper, FinalMode final_mode) {
  return std::clamp(RunWalk(step_stds, lower, upper, final_mode).p, 0.0, 1.0);
}

double TruncatedWalkMean(std::span<const double> step_stds,
                         std::span<const double> lower,
                         std::span<const double> upper, FinalMode final_mode) {
  const WalkMoments m = RunWalk(step_stds, lower, upper, final_mode);
  if (!(m.p > 0.0)) {
    throw DomainError("conditional mean of a zero-probability walk event");
  }
  return m.first / m.p;
}

int ChainGridIntervals(double capacity, double min_std) {
  return EvenIntervals(capacity, min_std);
}

ChainProfile GaussianChainWalk(double start, std::span<const double> drifts,
                               std::span<const double> stds, double capacity) {
  const int n = static_cast<int>(drifts.size());
  if (stds.size() != drifts.size()) {
    throw DomainError("chain drifts and stds differ in length");
  }
  if (!(capacity > 0.0)) throw DomainError("chain walk needs capacity > 0");
  if (n == 0) return {};
  const bool all_zero =
      std::all_of(stds.begin(), stds.end(), [](double s) { return s == 0.0; });
  if (all_zero) return DeterministicChain(start, drifts, capacity);
  double min_std = kInf;
  for (double s : stds) {
    if (!(s > 0.0)) {
      throw DomainError("chain walk needs all stds positive or all zero");
    }
    min_std = std::min(min_std, s);
  }

  ChainProfile p;
  ResizeProfile(n, &p);

  const int N = ChainGridIntervals(capacity, min_std);
  const double h = capacity / N;
  std::vector<double> w(N + 1);
  for (int i = 0; i <= N; ++i) w[i] = h * i;
  w[N] = capacity;
  const std::vector<double> q = SimpsonWeights(N, h);

  std::vector<double> g(N + 1);
  std::vector<double> next(N + 1);
  std::vector<double> weighted(N + 1);
  std::vector<double> kernel(2 * N + 1);
  double kernel_a = std::numeric_limits<double>::quiet_NaN();
  double kernel_tau = kernel_a;
  int band_lo = 0;
  int band_hi = 0;

  // Step 0 starts from the point mass at `start`.
  {
    const double a = drifts[0];
    const double tau = stds[0];
    const StepExit e = ExitFrom(start, a, tau, capacity);
    p.entering[0] = 1.0;
    p.left[0] = e.left;
    p.mid[0] = e.mid;
    p.right[0] = e.right;
    p.shortfall[0] = e.shortfall;
    for (int i = 0; i <= N; ++i) {
      g[i] = NormalPdf((w[i] - start - a) / tau) / tau;
    }
  }

  for (int k = 1; k < n; ++k) {
    const double a = drifts[k];
    const double tau = stds[k];
    double mass = 0.0;
    for (int i = 0; i <= N; ++i) {
      weighted[i] = q[i] * g[i];
      mass += weighted[i];
    }
    p.entering[k] = mass;
    if (!(mass > kExtinct)) break;

    double left = 0.0, mid = 0.0, right = 0.0, shortfall = 0.0;
    for (int i = 0; i <= N; ++i) {
      if (weighted[i] == 0.0) continue;
      const StepExit e = ExitFrom(w[i], a, tau, capacity);
      left += weighted[i] * e.left;
      mid += weighted[i] * e.mid;
      right += weighted[i] * e.right;
      shortfall += weighted[i] * e.shortfall;
    }
    p.left[k] = left;
    p.mid[k] = mid;
    p.right[k] = right;
    p.shortfall[k] = shortfall;
    if (k + 1 == n) break;

    // Offsets d = i' - i with |d h - a| beyond the support contribute 0.
    if (a != kernel_a || tau != kernel_tau) {
      kernel_a = a;
      kernel_tau = tau;
      const double reach = (kSupportSds + 1.0) * tau;
      band_lo = std::max(-N, static_cast<int>(std::floor((a - reach) / h)));
      band_hi = std::min(N, static_cast<int>(std::ceil((a + reach) / h)));
      for (int d = -N; d <= N; ++d) {
        kernel[d + N] = (d < band_lo || d > band_hi)
                            ? 0.0
                            : NormalPdf((d * h - a) / tau) / tau;
      }
    }
    for (int j = 0; j <= N; ++j) {
      const int i_lo = std::max(0, j - band_hi);
      const int i_hi = std::min(N, j - band_lo);
      double acc = 0.0;
      for (int i = i_lo; i <= i_hi; ++i) acc += weighted[i] * kernel[j - i + N];
      next[j] = acc;
    }
    g.swap(next);
  }
  return p;
}

ChainProfile DiscreteChainWalk(double start, std::span<const double> drifts,
                               std::span<const double> atoms,
                               std::span<const double> probs,
                               double capacity) {
  if (atoms.size() != probs.size() || atoms.empty()) {
    throw DomainError("discrete step law needs matching atoms and probs");
  }
  const int n = static_cast<int>(drifts.size());
  ChainProfile p;
  ResizeProfile(n, &p);
  std::vector<std::pair<double, double>> state{{start, 1.0}};
  std::vector<std::pair<double, double>> next;
  for (int k = 0; k < n && !state.empty(); ++k) {
    next.clear();
    for (const auto& [w, pw] : state) {
      p.entering[k] += pw;
      for (size_t m = 0; m < atoms.size(); ++m) {
        const double level = w + drifts[k] - atoms[m];
        const double mass = pw * probs[m];
        if (level < 0.0) {
          p.left[k] += mass;
          p.shortfall[k] += mass * -level;
        } else if (level > capacity) {
          p.right[k] += mass;
        } else {
          p.mid[k] += mass;
          next.emplace_back(level, mass);
        }
      }
    }
    state.swap(next);
  }
  return p;
}

}  // namespace rld
