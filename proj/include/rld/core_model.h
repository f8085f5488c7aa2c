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

// Domain types shared by every engine: the market ladder, storage device,
// delivery-interval forecast, forecast error curve and scenario config.
//
// Units. Energies are normalized so that the delivery-interval deficit (the
// sum of the per-stage deficits) lies in [-1, 1]. The accumulated position
// x_{R+1} and every threshold live in those interval units; the per-stage
// supply is x = x_{R+1} / T. The forecast error curve gives the standard
// deviation of the interval-total forecast error.

#ifndef RLD_CORE_MODEL_H_
#define RLD_CORE_MODEL_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace rld {

enum class Direction { kBuy, kSell };

const char* DirectionName(Direction d);

struct MarketStage {
  double lead_time_hours = 0.0;
  double price = 0.0;  // currency per unit energy
  Direction direction = Direction::kBuy;
};

// Recourse markets in dispatch order (stage 1 first, furthest from delivery).
struct MarketLadder {
  std::vector<MarketStage> stages;

  int size() const { return static_cast<int>(stages.size()); }
  // 1-based access, matching the stage numbering used throughout.
  const MarketStage& stage(int r) const { return stages.at(r - 1); }
  double max_price() const;
};

struct StorageSpec {
  double capacity = 0.0;              // B
  double storage_efficiency = 1.0;    // lambda
  double recharge_efficiency = 1.0;   // mu
  double discharge_efficiency = 1.0;  // nu

  bool ideal() const {
    return storage_efficiency == 1.0 && recharge_efficiency == 1.0 &&
           discharge_efficiency == 1.0;
  }
  static StorageSpec Ideal(double capacity) { return StorageSpec{capacity}; }
};

// Delivery-interval forecast seen from one dispatch stage: per-stage
// predicted deficit and independent Gaussian error standard deviations.
struct ForecastModel {
  std::vector<double> d_hat;
  std::vector<double> sigma;

  int T() const { return static_cast<int>(d_hat.size()); }
  double total_mean() const;
  double total_variance() const;
  // D_hat_t and sigma_t identical across the interval.
  bool constant_profile() const;
  // Every predicted deficit shifted by total_shift / T.
  ForecastModel Shifted(double total_shift) const;

  // Interval total `total_mean` spread evenly; `total_variance` split evenly
  // into independent per-stage errors.
  static ForecastModel Uniform(int T, double total_mean,
                               double total_variance);
  // Throws ValidationError unless lengths match, T >= 1 and sigma >= 0.
  void Validate() const;
};

// Horizon-ahead forecast error standard deviation, sigma(h). Knots are
// stored by decreasing horizon; lookups interpolate linearly in variance.
class ForecastErrorCurve {
 public:
  struct Knot {
    double horizon_hours;
    double sigma;
  };

  ForecastErrorCurve() = default;
  // Throws ValidationError unless horizons strictly decrease and sigma is
  // nonnegative and nonincreasing toward delivery.
  explicit ForecastErrorCurve(std::vector<Knot> knots);

  double variance_at(double horizon_hours) const;
  double sigma_at(double horizon_hours) const;
  double max_horizon() const { return knots_.front().horizon_hours; }
  double min_horizon() const { return knots_.back().horizon_hours; }
  const std::vector<Knot>& knots() const { return knots_; }
  bool empty() const { return knots_.empty(); }

 private:
  std::vector<Knot> knots_;
};

struct CostModel {
  double voll = 0.0;  // c, currency per unit of unserved energy
};

struct LadderViolation {
  int first_stage;   // 1-based
  int second_stage;  // 1-based; 0 for single-stage or VOLL checks
  std::string message;
};

// Every violated price-ordering constraint; empty when the ladder is valid.
std::vector<LadderViolation> ValidateLadder(const MarketLadder& ladder,
                                            const CostModel& cost);

// Variance of the forecast information revealed between stage r-1 and stage
// r, sigma(t_{r-1})^2 - sigma(t_r)^2 clamped at zero, for r in 1..R. Stage 0
// is the longest horizon on the curve. Throws RangeError when a lead time
// falls outside the curve.
double StageErrorVariance(const ForecastErrorCurve& curve, int r,
                          const MarketLadder& ladder);

// The error left after the last dispatch stage, sigma(t_R)^2, is split into a
// common shift of the interval mean (mean_share of it, revealed at delivery)
// and independent within-interval fluctuations (the rest, sigma_{R+1}^2).
struct ResidualSplit {
  double mean_variance;
  double within_variance;
};
ResidualSplit DeliveryVarianceSplit(const ForecastErrorCurve& curve,
                                    const MarketLadder& ladder,
                                    double mean_share);

struct Scenario {
  MarketLadder ladder;
  StorageSpec storage;
  CostModel cost;
  ForecastErrorCurve curve;
  double mean_share = 0.2;
  int T = 1;
  std::vector<double> d_hat;  // per-stage predicted deficit, length T

  double interval_deficit() const;  // sum of d_hat
  // Forecast model conditional on delivery-time information: d_hat with the
  // within-interval variance spread over T independent stages.
  ForecastModel DeliveryForecast() const;
  // Variances of the successive forecast revisions after stage 1: entry i is
  // revealed between stage i+1 and i+2 (1-based), the last entry is the mean
  // error revealed at delivery. Size R.
  std::vector<double> RevisionVariances() const;
  // Copy with d_hat replaced by a uniform profile summing to interval_total.
  Scenario WithIntervalDeficit(double interval_total) const;
  Scenario WithCapacity(double capacity) const;
};

// Parses the curve CSV (header `horizon_hours,sigma`, rows by decreasing
// horizon). Throws ParseError on schema problems.
ForecastErrorCurve LoadForecastCurve(const std::filesystem::path& path);
ForecastErrorCurve ParseForecastCurve(const std::string& csv_text);

// Builds and validates a scenario from its JSON document; a relative
// curve_file resolves against base_dir.
Scenario ParseScenario(const nlohmann::json& doc,
                       const std::filesystem::path& base_dir);
Scenario LoadScenario(const std::filesystem::path& path);

// Throws ValidationError naming the first broken field.
void ValidateScenario(const Scenario& scenario);

}  // namespace rld

#endif  // RLD_CORE_MODEL_H_
