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

#include "rld/core_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rld/csv.h"
#include "rld/errors.h"

namespace rld {

const char* DirectionName(Direction d) {
  return d == Direction::kBuy ? "buy" : "sell";
}

double MarketLadder::max_price() const {
  double m = 0.0;
  for (const auto& s : stages) m = std::max(m, s.price);
  return m;
}

// ---------------------------------------------------------------------------
// ForecastModel

double ForecastModel::total_mean() const {
  return std::accumulate(d_hat.begin(), d_hat.end(), 0.0);
}

double ForecastModel::total_variance() const {
  double v = 0.0;
  for (double s : sigma) v += s * s;
  return v;
}

bool ForecastModel::constant_profile() const {
  for (size_t i = 1; i < d_hat.size(); ++i) {
    if (d_hat[i] != d_hat[0] || sigma[i] != sigma[0]) return false;
  }
  return true;
}

ForecastModel ForecastModel::Shifted(double total_shift) const {
  ForecastModel out = *this;
  const double per_stage = total_shift / T();
  for (double& d : out.d_hat) d += per_stage;
  return out;
}

ForecastModel ForecastModel::Uniform(int T, double total_mean,
                                     double total_variance) {
  ForecastModel f;
  f.d_hat.assign(T, total_mean / T);
  f.sigma.assign(T, std::sqrt(total_variance / T));
  return f;
}

void ForecastModel::Validate() const {
  if (d_hat.empty()) throw ValidationError("T", "must be at least 1");
  if (sigma.size() != d_hat.size()) {
    throw ValidationError("sigma", "length differs from d_hat");
  }
  for (size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] >= 0.0) || !std::isfinite(sigma[i])) {
      throw ValidationError("sigma[" + std::to_string(i) + "]",
                            "must be finite and nonnegative");
    }
    if (!std::isfinite(d_hat[i])) {
      throw ValidationError("d_hat[" + std::to_string(i) + "]",
                            "must be finite");
    }
  }
}

// ---------------------------------------------------------------------------
// ForecastErrorCurve

ForecastErrorCurve::ForecastErrorCurve(std::vector<Knot> knots)
    : knots_(std::move(knots)) {
  if (knots_.empty()) throw ValidationError("curve", "no knots");
  for (size_t i = 0; i < knots_.size(); ++i) {
    const auto& k = knots_[i];
    const std::string where = "curve[" + std::to_string(i) + "]";
    if (!std::isfinite(k.horizon_hours) || k.horizon_hours < 0.0) {
      throw ValidationError(where + ".horizon_hours",
                            "must be finite and nonnegative");
    }
    if (!std::isfinite(k.sigma) || k.sigma < 0.0) {
      throw ValidationError(where + ".sigma", "must be finite and nonnegative");
    }
    if (i > 0) {
      if (!(k.horizon_hours < knots_[i - 1].horizon_hours)) {
        throw ValidationError(where + ".horizon_hours",
                              "rows must be sorted by decreasing horizon");
      }
      if (k.sigma > knots_[i - 1].sigma) {
        throw ValidationError(where + ".sigma",
                              "must not increase as the horizon shrinks");
      }
    }
  }
}

double ForecastErrorCurve::variance_at(double horizon_hours) const {
  if (knots_.empty()) throw RangeError("forecast curve is empty");
  if (horizon_hours > max_horizon() || horizon_hours < min_horizon()) {
    throw RangeError("horizon " + std::to_string(horizon_hours) +
                     "h outside forecast curve range [" +
                     std::to_string(min_horizon()) + ", " +
                     std::to_string(max_horizon()) + "]");
  }
  for (size_t i = 0; i + 1 < knots_.size(); ++i) {
    const auto& hi = knots_[i];
    const auto& lo = knots_[i + 1];
    if (horizon_hours <= hi.horizon_hours && horizon_hours >= lo.horizon_hours) {
      const double w = (horizon_hours - lo.horizon_hours) /
                       (hi.horizon_hours - lo.horizon_hours);
      return lo.sigma * lo.sigma + w * (hi.sigma * hi.sigma - lo.sigma * lo.sigma);
    }
  }
  return knots_.back().sigma * knots_.back().sigma;  // single-knot curve
}

double ForecastErrorCurve::sigma_at(double horizon_hours) const {
  return std::sqrt(variance_at(horizon_hours));
}

// ---------------------------------------------------------------------------
// Ladder validation

std::vector<LadderViolation> ValidateLadder(const MarketLadder& ladder,
                                            const CostModel& cost) {
  std::vector<LadderViolation> out;
  const int R = ladder.size();
  if (R == 0) {
    out.push_back({0, 0, "ladder has no stages"});
    return out;
  }
  for (int r = 1; r <= R; ++r) {
    const auto& s = ladder.stage(r);
    if (s.direction == Direction::kBuy && !(s.price > 0.0)) {
      out.push_back({r, 0, "buy price must be positive"});
    }
    if (!(s.lead_time_hours >= 0.0)) {
      out.push_back({r, 0, "lead time must be nonnegative"});
    }
  }
  for (int r1 = 1; r1 <= R; ++r1) {
    for (int r2 = r1 + 1; r2 <= R; ++r2) {
      const auto& a = ladder.stage(r1);
      const auto& b = ladder.stage(r2);
      const std::string pair =
          "c_" + std::to_string(r1) + ", c_" + std::to_string(r2);
      if (a.direction == Direction::kBuy && b.direction == Direction::kBuy &&
          !(a.price < b.price)) {
        out.push_back({r1, r2, "buy prices must increase toward delivery (" +
                                   pair + ": c_" + std::to_string(r1) +
                                   " < c_" + std::to_string(r2) +
                                   " required)"});
      }
      if (a.direction == Direction::kSell && b.direction == Direction::kSell &&
          !(a.price > b.price)) {
        out.push_back({r1, r2, "sell prices must decrease toward delivery (" +
                                   pair + ")"});
      }
      if (a.direction == Direction::kBuy && b.direction == Direction::kSell &&
          !(a.price > b.price)) {
        out.push_back({r1, r2, "no-arbitrage: earlier buy price must exceed "
                               "later sell price (" + pair + ")"});
      }
      if (!(a.lead_time_hours > b.lead_time_hours)) {
        out.push_back({r1, r2, "lead times must strictly decrease"});
      }
    }
  }
  if (!(cost.voll > ladder.max_price())) {
    out.push_back({0, 0, "VOLL must exceed every ladder price"});
  }
  return out;
}

double StageErrorVariance(const ForecastErrorCurve& curve, int r,
                          const MarketLadder& ladder) {
  if (r < 1 || r > ladder.size()) {
    throw DomainError("stage index " + std::to_string(r) + " outside 1.." +
                      std::to_string(ladder.size()));
  }
  const double before = r == 1 ? curve.max_horizon()
                               : ladder.stage(r - 1).lead_time_hours;
  const double after = ladder.stage(r).lead_time_hours;
  return std::max(0.0, curve.variance_at(before) - curve.variance_at(after));
}

ResidualSplit DeliveryVarianceSplit(const ForecastErrorCurve& curve,
                                    const MarketLadder& ladder,
                                    double mean_share) {
  const double v = curve.variance_at(ladder.stage(ladder.size()).lead_time_hours);
  return {mean_share * v, (1.0 - mean_share) * v};
}

// ---------------------------------------------------------------------------
// Scenario

double Scenario::interval_deficit() const {
  return std::accumulate(d_hat.begin(), d_hat.end(), 0.0);
}

ForecastModel Scenario::DeliveryForecast() const {
  const auto split = DeliveryVarianceSplit(curve, ladder, mean_share);
  ForecastModel f;
  f.d_hat = d_hat;
  f.sigma.assign(T, std::sqrt(split.within_variance / T));
  return f;
}

std::vector<double> Scenario::RevisionVariances() const {
  std::vector<double> out;
  for (int r = 2; r <= ladder.size(); ++r) {
    out.push_back(StageErrorVariance(curve, r, ladder));
  }
  out.push_back(DeliveryVarianceSplit(curve, ladder, mean_share).mean_variance);
  return out;
}

Scenario Scenario::WithIntervalDeficit(double interval_total) const {
  Scenario s = *this;
  s.d_hat.assign(T, interval_total / T);
  return s;
}

Scenario Scenario::WithCapacity(double capacity) const {
  Scenario s = *this;
  s.storage.capacity = capacity;
  return s;
}

void ValidateScenario(const Scenario& s) {
  const auto violations = ValidateLadder(s.ladder, s.cost);
  if (!violations.empty()) {
    const auto& v = violations.front();
    std::string field = "ladder";
    if (v.first_stage > 0) field += "[" + std::to_string(v.first_stage - 1) + "]";
    if (v.first_stage == 0 && v.second_stage == 0 && s.ladder.size() > 0) {
      field = "voll";
    }
    throw ValidationError(field, v.message);
  }
  const auto& st = s.storage;
  if (!(st.capacity >= 0.0) || !std::isfinite(st.capacity)) {
    throw ValidationError("storage.B", "must be finite and nonnegative");
  }
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(st.storage_efficiency)) {
    throw ValidationError("storage.lambda", "must lie in [0, 1]");
  }
  if (!unit(st.recharge_efficiency)) {
    throw ValidationError("storage.mu", "must lie in [0, 1]");
  }
  if (!unit(st.discharge_efficiency)) {
    throw ValidationError("storage.nu", "must lie in [0, 1]");
  }
  if (s.T < 1) throw ValidationError("T", "must be at least 1");
  if (static_cast<int>(s.d_hat.size()) != s.T) {
    throw ValidationError("d_hat", "array length must equal T");
  }
  for (double d : s.d_hat) {
    if (!std::isfinite(d)) throw ValidationError("d_hat", "must be finite");
  }
  if (!unit(s.mean_share)) {
    throw ValidationError("mean_share", "must lie in [0, 1]");
  }
  if (s.curve.empty()) throw ValidationError("curve_file", "curve is empty");
  for (int r = 1; r <= s.ladder.size(); ++r) {
    const double h = s.ladder.stage(r).lead_time_hours;
    if (h > s.curve.max_horizon() || h < s.curve.min_horizon()) {
      throw ValidationError("ladder[" + std::to_string(r - 1) +
                                "].lead_time_hours",
                            "outside the forecast curve horizon range");
    }
  }
}

ForecastErrorCurve ParseForecastCurve(const std::string& csv_text) {
  const auto table = csv::Parse(csv_text);
  const int h = table.column("horizon_hours");
  const int s = table.column("sigma");
  if (h < 0) throw ParseError("forecast curve: missing column 'horizon_hours'");
  if (s < 0) throw ParseError("forecast curve: missing column 'sigma'");
  std::vector<ForecastErrorCurve::Knot> knots;
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = "forecast curve row " + std::to_string(i + 1);
    knots.push_back({csv::ParseDouble(row[h], where + " horizon_hours"),
                     csv::ParseDouble(row[s], where + " sigma")});
  }
  if (knots.empty()) throw ParseError("forecast curve: no data rows");
  return ForecastErrorCurve(std::move(knots));
}

ForecastErrorCurve LoadForecastCurve(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open forecast curve " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseForecastCurve(buf.str());
}

namespace {

using nlohmann::json;

const json& Require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError("missing field '" + path + "'");
  }
  return obj.at(key);
}

double NumberAt(const json& obj, const char* key, const std::string& path) {
  const json& v = Require(obj, key, path);
  if (!v.is_number()) throw ParseError("field '" + path + "' must be a number");
  return v.get<double>();
}

double NumberOr(const json& obj, const char* key, const std::string& path,
                double fallback) {
  if (!obj.contains(key)) return fallback;
  return NumberAt(obj, key, path);
}

}  // namespace

Scenario ParseScenario(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
  Scenario s;

  const json& ladder = Require(doc, "ladder", "ladder");
  if (!ladder.is_array()) throw ParseError("field 'ladder' must be an array");
  for (size_t i = 0; i < ladder.size(); ++i) {
    const std::string p = "ladder[" + std::to_string(i) + "]";
    MarketStage st;
    st.lead_time_hours =
        NumberAt(ladder[i], "lead_time_hours", p + ".lead_time_hours");
    st.price = NumberAt(ladder[i], "price", p + ".price");
    const json& dir = Require(ladder[i], "direction", p + ".direction");
    if (dir == "buy") {
      st.direction = Direction::kBuy;
    } else if (dir == "sell") {
      st.direction = Direction::kSell;
    } else {
      throw ParseError("field '" + p + ".direction' must be \"buy\" or \"sell\"");
    }
    s.ladder.stages.push_back(st);
  }

  s.cost.voll = NumberAt(doc, "voll", "voll");

  const json& storage = Require(doc, "storage", "storage");
  s.storage.capacity = NumberAt(storage, "B", "storage.B");
  s.storage.storage_efficiency =
      NumberOr(storage, "lambda", "storage.lambda", 1.0);
  s.storage.recharge_efficiency = NumberOr(storage, "mu", "storage.mu", 1.0);
  s.storage.discharge_efficiency = NumberOr(storage, "nu", "storage.nu", 1.0);

  const json& T = Require(doc, "T", "T");
  if (!T.is_number_integer()) throw ParseError("field 'T' must be an integer");
  s.T = T.get<int>();

  const json& d_hat = Require(doc, "d_hat", "d_hat");
  if (d_hat.is_number()) {
    // A scalar is the interval deficit, spread evenly.
    if (s.T >= 1) s.d_hat.assign(s.T, d_hat.get<double>() / s.T);
  } else if (d_hat.is_array()) {
    for (size_t i = 0; i < d_hat.size(); ++i) {
      if (!d_hat[i].is_number()) {
        throw ParseError("field 'd_hat[" + std::to_string(i) +
                         "]' must be a number");
      }
      s.d_hat.push_back(d_hat[i].get<double>());
    }
  } else {
    throw ParseError("field 'd_hat' must be a number or an array");
  }

  s.mean_share = NumberOr(doc, "mean_share", "mean_share", 0.2);

  const json& curve_file = Require(doc, "curve_file", "curve_file");
  if (!curve_file.is_string()) {
    throw ParseError("field 'curve_file' must be a string");
  }
  std::filesystem::path curve_path = curve_file.get<std::string>();
  if (curve_path.is_relative()) curve_path = base_dir / curve_path;
  s.curve = LoadForecastCurve(curve_path);

  ValidateScenario(s);
  return s;
}

Scenario LoadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return ParseScenario(doc, path.parent_path());
}

}  // namespace rld
