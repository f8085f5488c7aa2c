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


#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "rld/errors.h"
#include "rld/lattice.h"
#include "rld/storage_ops.h"
#include "test_util.h"

namespace rld {
namespace {

constexpr double kC = 1000.0;

ForecastModel Profile(std::vector<double> d_hat, std::vector<double> sigma) {
  ForecastModel f;
  f.d_hat = std::move(d_hat);
  f.sigma = std::move(sigma);
  return f;
}

TEST_CASE("lattice shapes and effective deficits") {
  const ForecastModel one = Profile({0.3}, {0.1});
  const Lattice l1 = BuildLattice(one, 0.5, 0.2);
  REQUIRE(l1.T() == 1);
  REQUIRE(l1.levels[0].size() == 1);
  CHECK(l1.node(1, 1).d_hat_eff == 0.3);

  const ForecastModel three = Profile({0.3, 0.1, 0.4}, {0.1, 0.2, 0.3});
  const double x = 0.25;
  const double B = 0.5;
  const Lattice l3 = BuildLattice(three, B, x);
  CHECK(l3.levels[0].size() == 1);
  CHECK(l3.levels[1].size() == 3);
  CHECK(l3.levels[2].size() == 5);
  CHECK(l3.node(2, 1).d_hat_eff == doctest::Approx(0.1));
  CHECK(l3.node(2, 2).d_hat_eff == doctest::Approx(0.1 - (x - 0.3)));
  CHECK(l3.node(2, 3).d_hat_eff == doctest::Approx(0.1 - B));
  CHECK(l3.node(3, 3).depth == 2);
  CHECK(l3.node(3, 3).d_hat_eff ==
        doctest::Approx(0.4 - (x - 0.3) - (x - 0.1)));
  CHECK(l3.node(3, 4).d_hat_eff == doctest::Approx(0.4 - (x - 0.1) - B));
  CHECK(l3.node(3, 5).d_hat_eff == doctest::Approx(0.4 - B));
  CHECK(l3.node(3, 3).error_variance ==
        doctest::Approx(0.01 + 0.04 + 0.09).epsilon(1e-14));
  CHECK(l3.node(3, 4).error_variance == doctest::Approx(0.04 + 0.09));
  CHECK_THROWS_AS(BuildLattice(three, 0.0, x), DomainError);
}

TEST_CASE("property: level sizes grow by two") {
  testing::Gen gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int T = gen.Int(1, 12);
    const Lattice l = BuildLattice(ForecastModel::Uniform(T, 0.3, 0.01), 0.1, 0.02);
    for (int t = 1; t <= T; ++t) {
      CHECK(static_cast<int>(l.levels[t - 1].size()) == 2 * t - 1);
      for (const LatticeNode& n : l.levels[t - 1]) {
        CHECK(n.depth == std::min(n.k - 1, 2 * t - 1 - n.k));
      }
    }
  }
}

TEST_CASE("root node with a huge device splits at the forecast") {
  const ForecastModel f = Profile({0.0}, {1.0});
  const Lattice l = BuildLattice(f, 1e6, 0.0);
  const NodeProbabilities p = NodeTransitionProbs(l, l.node(1, 1), 1.0);
  CHECK(p.p == 1.0);
  CHECK(p.p_left == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.p_mid == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.p_right == doctest::Approx(0.0));
}

TEST_CASE("root node with a vanishing device has no interior mass") {
  const ForecastModel f = Profile({0.0}, {1.0});
  const Lattice l = BuildLattice(f, 1e-9, 0.0);
  const NodeProbabilities p = NodeTransitionProbs(l, l.node(1, 1), 1.0);
  CHECK(p.p_mid < 1e-8);
  CHECK(p.p_left + p.p_right == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("levels normalize and nodes conserve mass") {
  const ForecastModel f = Profile({0.02, 0.01, 0.03, 0.0, 0.02, 0.01},
                                  {0.02, 0.03, 0.02, 0.025, 0.02, 0.03});
  for (double B : {0.005, 0.02, 0.08}) {
    const LatticeSolution s = SolveLattice(f, B, 0.09, kC, true);
    for (int t = 1; t <= f.T(); ++t) {
      double level = 0.0;
      for (const NodeProbabilities& p : s.nodes[t - 1]) {
        level += p.p;
        CHECK(p.p_left + p.p_mid + p.p_right == doctest::Approx(p.p).epsilon(1e-8));
        CHECK(p.p >= 0.0);
        CHECK(p.p <= 1.0 + 1e-12);
      }
      CHECK(level == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("chain recursion and per-node rectangle route agree") {
  const ForecastModel f = Profile({0.02, 0.01, 0.03, 0.0, 0.02},
                                  {0.02, 0.03, 0.02, 0.025, 0.02});
  const double B = 0.03;
  const double x_total = 0.08;
  const LatticeSolution s = SolveLattice(f, B, x_total, kC, true);
  const Lattice l = BuildLattice(f, B, x_total / f.T());
  for (int t = 1; t <= f.T(); ++t) {
    for (const LatticeNode& node : l.levels[t - 1]) {
      const int j = node.start - 1;
      const double boundary = node.from_full ? s.p_full[j] : s.p_empty[j];
      const NodeProbabilities a = NodeTransitionProbs(l, node, boundary);
      const NodeProbabilities& b = s.nodes[t - 1][node.k - 1];
      CAPTURE(t);
      CAPTURE(node.k);
      CHECK(a.p == doctest::Approx(b.p).epsilon(1e-6));
      CHECK(a.p_left == doctest::Approx(b.p_left).epsilon(1e-6));
      CHECK(a.p_right == doctest::Approx(b.p_right).epsilon(1e-6));
      CHECK(a.shortfall == doctest::Approx(b.shortfall).epsilon(1e-6));
    }
  }
}

TEST_CASE("two-stage node probabilities match simulated state frequencies") {
  const ForecastModel f = Profile({0.1, 0.15}, {0.1, 0.12});
  const double B = 0.05;
  const double x = 0.12;
  const LatticeSolution s = SolveLattice(f, B, 2 * x, kC, true);
  const double tol = BoundaryTolerance(B);
  // Node index of stage 2 by the level entering it; then exit counts.
  std::vector<testing::Moments> visit(3), left(3), right(3);
  testing::Gen gen(12);
  for (int i = 0; i < 100000; ++i) {
    const double d1 = gen.Normal(0.1, 0.1);
    const double d2 = gen.Normal(0.15, 0.12);
    const double w1 = std::clamp(x - d1, 0.0, B);
    const int k = x - d1 <= tol ? 0 : (x - d1 >= B - tol ? 2 : 1);
    const double w2 = w1 + x - d2;
    for (int n = 0; n < 3; ++n) {
      visit[n].Add(n == k);
      left[n].Add(n == k && w2 < 0.0);
      right[n].Add(n == k && w2 >= B);
    }
  }
  for (int n = 0; n < 3; ++n) {
    const NodeProbabilities& p = s.nodes[1][n];
    CAPTURE(n);
    CHECK(std::abs(p.p - visit[n].mean()) <= 3.0 * visit[n].se());
    CHECK(std::abs(p.p_left - left[n].mean()) <= 3.0 * left[n].se());
    CHECK(std::abs(p.p_right - right[n].mean()) <= 3.0 * right[n].se());
  }
}

TEST_CASE("terminal cost limits") {
  const ForecastModel f = Profile({0.1, 0.2, 0.0}, {0.05, 0.05, 0.05});
  CHECK(LatticeTerminalCost(30.0, f, 10.0, kC) < 1e-12);
  const ForecastModel z = Profile({0.0, 0.0}, {1.0, 1.0});
  CHECK(LatticeTerminalCost(0.0, z, 1e-6, kC) ==
        doctest::Approx(2.0 * kC / std::sqrt(2.0 * M_PI)).epsilon(1e-4));
}

TEST_CASE("terminal cost matches Monte Carlo through the greedy recursion") {
  const double var = 2.26e-4;
  for (int T : {5, 10}) {
    for (double B : {0.001, 0.01}) {
      const ForecastModel f = ForecastModel::Uniform(T, 0.4, var);
      const double x_total = 0.4 + 0.5 * std::sqrt(var);
      const double lattice = LatticeTerminalCost(x_total, f, B, kC);
      testing::Gen gen(100 + T);
      testing::Moments mc;
      for (int i = 0; i < 100000; ++i) {
        const auto d = gen.NormalPath(T, 0.4 / T, f.sigma[0]);
        mc.Add(kC * IdealDeliveryShortfall(d, x_total / T, B));
      }
      CAPTURE(T);
      CAPTURE(B);
      CHECK(std::abs(lattice - mc.mean()) <= 3.0 * mc.se());
    }
  }
}

TEST_CASE("subgradient is bounded, monotone and matches finite differences") {
  const ForecastModel f = ForecastModel::Uniform(8, 0.4, 4e-4);
  for (double B : {0.001, 0.01}) {
    double previous = -kC;
    for (int i = -4; i <= 4; ++i) {
      const double x = 0.4 + 0.01 * i;
      const double g = LatticeTerminalSubgradient(x, f, B, kC);
      const double up = LatticeTerminalCost(x + 1e-3, f, B, kC);
      const double dn = LatticeTerminalCost(x - 1e-3, f, B, kC);
      const double fd = (up - dn) / 2e-3;
      CAPTURE(B);
      CAPTURE(x);
      CHECK(g >= -kC);
      CHECK(g <= 0.0);
      CHECK(g >= previous);
      CHECK(std::abs(g - fd) <= 1e-2 * std::abs(fd));
      previous = g;
    }
  }
  CHECK(LatticeTerminalSubgradient(-50.0, f, 0.01, kC) ==
        doctest::Approx(-kC).epsilon(1e-9));
  CHECK(LatticeTerminalSubgradient(50.0, f, 0.01, kC) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("closed form without storage") {
  const ForecastModel one = Profile({0.0}, {1.0});
  const TerminalValue v = ClosedFormB0(0.0, one, kC);
  CHECK(v.cost == doctest::Approx(kC / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
  CHECK(v.subgradient == doctest::Approx(-kC / 2.0).epsilon(1e-14));
  const ForecastModel f = Profile({0.1, -0.2, 0.3}, {0.2, 0.1, 0.4});
  const TerminalValue far = ClosedFormB0(1e3, f, kC);
  CHECK(far.cost == doctest::Approx(0.0));
  CHECK(far.subgradient == doctest::Approx(0.0));
  const ForecastModel sym = Profile({0.2, 0.2}, {0.1, 0.3});
  CHECK(ClosedFormB0(0.4, sym, kC).subgradient == doctest::Approx(-kC / 2.0));
  // Hard newsvendor limit for a certain deficit.
  const ForecastModel sure = Profile({0.3, 0.1}, {0.0, 0.0});
  const TerminalValue h = ClosedFormB0(0.4, sure, kC);
  CHECK(h.cost == doctest::Approx(kC * 0.1));
  CHECK(h.subgradient == doctest::Approx(-kC / 2.0));
  // Zero capacity is routed to the closed form.
  CHECK(LatticeTerminalCost(0.1, f, 0.0, kC) == ClosedFormB0(0.1, f, kC).cost);
}

TEST_CASE("closed form matches Gaussian partial expectations") {
  testing::Gen gen(6);
  for (int trial = 0; trial < 200; ++trial) {
    const int T = gen.Int(1, 8);
    ForecastModel f;
    for (int t = 0; t < T; ++t) {
      f.d_hat.push_back(gen.Uniform(-0.2, 0.3));
      f.sigma.push_back(gen.Uniform(0.01, 0.3));
    }
    const double x_total = gen.Uniform(-0.5, 1.5);
    double cost = 0.0;
    double tail = 0.0;
    for (int t = 0; t < T; ++t) {
      cost += testing::ExcessOver(f.d_hat[t], f.sigma[t], x_total / T);
      tail += testing::Phi((f.d_hat[t] - x_total / T) / f.sigma[t]);
    }
    const TerminalValue v = ClosedFormB0(x_total, f, kC);
    CHECK(v.cost == doctest::Approx(kC * cost).epsilon(1e-10));
    CHECK(v.subgradient == doctest::Approx(-kC * tail / T).epsilon(1e-10));
  }
}

TEST_CASE("huge device never fills and tracks the running maximum") {
  const int T = 4;
  const ForecastModel f = ForecastModel::Uniform(T, 0.4, 0.04);
  const double B = 0.4 + 6.0 * T * f.sigma[0];
  const LatticeSolution s = SolveLattice(f, B, 0.5, kC, true);
  for (const auto& level : s.nodes) {
    for (const NodeProbabilities& p : level) CHECK(p.p_right < 1e-8);
  }
  // With no upper bound the shortfall is the running maximum of the walk.
  testing::Gen gen(9);
  testing::Moments mc;
  for (int i = 0; i < 100000; ++i) {
    double sum = 0.0;
    double worst = 0.0;
    for (int t = 0; t < T; ++t) {
      sum += gen.Normal(0.1, f.sigma[0]) - 0.5 / T;
      worst = std::max(worst, sum);
    }
    mc.Add(kC * worst);
  }
  CHECK(std::abs(s.cost - mc.mean()) <= 3.0 * mc.se());
}

TEST_CASE("discrete errors agree with exhaustive enumeration") {
  const std::vector<double> d_hat{0.12, 0.08};
  const std::vector<double> atoms{-0.05, 0.0, 0.02, 0.07};
  const std::vector<double> probs{0.2, 0.3, 0.4, 0.1};
  for (double B : {0.01, 0.05}) {
    for (double x_total : {0.15, 0.2, 0.3}) {
      double oracle = 0.0;
      for (size_t a = 0; a < atoms.size(); ++a) {
        for (size_t b = 0; b < atoms.size(); ++b) {
          const std::vector<double> d{d_hat[0] + atoms[a], d_hat[1] + atoms[b]};
          oracle += probs[a] * probs[b] * IdealDeliveryShortfall(d, x_total / 2, B);
        }
      }
      const LatticeSolution s =
          SolveLatticeDiscrete(d_hat, atoms, probs, B, x_total, kC);
      CHECK(s.cost == doctest::Approx(kC * oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("lattice dump lists every node") {
  const ForecastModel f = ForecastModel::Uniform(3, 0.3, 0.01);
  const LatticeSolution s = SolveLattice(f, 0.05, 0.3, kC, true);
  const Lattice l = BuildLattice(f, 0.05, 0.1);
  std::ostringstream out;
  WriteLatticeCsv(l, s, out);
  const std::string text = out.str();
  CHECK(text.rfind("t,k,d_hat_eff,depth,p,p_left,p_mid,p_right\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 1 + 3 + 5);
  CHECK_THROWS_AS(WriteLatticeCsv(l, SolveLattice(f, 0.05, 0.3, kC), out),
                  DomainError);
}

}  // namespace
}  // namespace rld
