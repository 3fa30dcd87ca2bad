#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "epiwave/dates.hpp"
#include "epiwave/errors.hpp"
#include "epiwave/particle_filter.hpp"
#include "epiwave/rng.hpp"
#include "epiwave/sir.hpp"

namespace epiwave {

enum class ScenarioKind { A, B };

inline const char* to_string(ScenarioKind k) { return k == ScenarioKind::A ? "A" : "B"; }

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::A;
  int rise_days = 15;
  int fall_days = 30;
  double slope = 0.0;   // 1/day^2, from estimate_slope
  double beta0 = 0.0;   // 1/day, posterior mean beta at the forecast day
  double gamma0 = 0.0;  // 1/day, held constant over the horizon
};

// Hypothesized infection-rate path. beta[d-1] is the rate on forecast day d;
// beta0 anchors the per-particle offsets in ensemble_forecast.
struct BetaTrajectory {
  std::vector<double> beta;
  double beta0 = 0.0;
};

// Scenario A continues the current slope for rise_days, then holds.
// Scenario B (only distinct when slope > 0) additionally falls for fall_days
// at the opposite slope before holding.
inline BetaTrajectory build_scenario(const ScenarioSpec& spec, int k) {
  if (k < 1) throw Error::config("invalid-horizon: forecast horizon must be >= 1 days");
  if (spec.rise_days < 0 || spec.fall_days < 0)
    throw Error::config("invalid-input: rise/fall days must be >= 0");
  if (spec.beta0 < 0.0 || spec.gamma0 < 0.0)
    throw Error::config("invalid-input: beta0 and gamma0 must be >= 0");

  BetaTrajectory traj;
  traj.beta0 = spec.beta0;
  traj.beta.resize(k);
  const bool fall = spec.kind == ScenarioKind::B && spec.slope > 0.0;
  const double peak = spec.beta0 + spec.slope * spec.rise_days;
  for (int d = 1; d <= k; ++d) {
    double value;
    if (d <= spec.rise_days) {
      value = spec.beta0 + spec.slope * d;
    } else if (fall && d <= spec.rise_days + spec.fall_days) {
      value = peak - spec.slope * (d - spec.rise_days);
    } else if (fall) {
      value = peak - spec.slope * spec.fall_days;
    } else {
      value = peak;
    }
    traj.beta[d - 1] = std::max(0.0, value);
  }
  return traj;
}

struct ForecastDay {
  Date date;
  double i_mean = 0.0, i_std = 0.0, i_q05 = 0.0, i_q95 = 0.0;
  double r_mean = 0.0, r_std = 0.0, r_q05 = 0.0, r_q95 = 0.0;
};

struct ForecastResult {
  std::vector<ForecastDay> days;
  int ensemble_size = 0;
  int forecast_day = 0;  // series index of the origin
  Date origin_date;
};

namespace detail {

inline void summarize_forecast_day(const std::vector<SirState>& states, ForecastDay& out) {
  const double m = static_cast<double>(states.size());
  std::vector<double> iv(states.size()), rv(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    iv[j] = states[j].i;
    rv[j] = states[j].r;
  }
  auto stats = [m](std::vector<double>& v, double& mean, double& sd, double& q05, double& q95) {
    mean = 0.0;
    double sq = 0.0;
    for (double x : v) { mean += x; sq += x * x; }
    mean /= m;
    sd = std::sqrt(std::max(0.0, sq / m - mean * mean));
    std::sort(v.begin(), v.end());
    auto quantile = [&](double q) {
      std::size_t idx = static_cast<std::size_t>(std::ceil(q * m)) - 1;
      return v[std::min(idx, v.size() - 1)];
    };
    q05 = quantile(0.05);
    q95 = quantile(0.95);
  };
  stats(iv, out.i_mean, out.i_std, out.i_q05, out.i_q95);
  stats(rv, out.r_mean, out.r_std, out.r_q05, out.r_q95);
}

}  // namespace detail

// Propagates the checkpoint ensemble k days ahead. Each particle follows the
// scenario trajectory scaled by its own beta ratio at the origin (so the
// posterior spread is carried forward), keeps its gamma, and is stepped with
// process noise. Weights are equalized by resampling first.
inline ForecastResult ensemble_forecast(const Ensemble& checkpoint, const BetaTrajectory& traj,
                                        const NoiseConfig& noise, int k, Rng& rng,
                                        Date origin_date) {
  if (k < 1) throw Error::config("invalid-horizon: forecast horizon must be >= 1 days");
  if (static_cast<int>(traj.beta.size()) != k)
    throw Error::data("invalid-input: trajectory length must equal the horizon");
  if (checkpoint.particles.empty()) throw Error::data("invalid-input: empty ensemble");

  Ensemble ens = checkpoint;
  systematic_resample(ens, rng);

  std::vector<double> offset(ens.particles.size(), 1.0);
  if (traj.beta0 > 0.0) {
    for (std::size_t m = 0; m < ens.particles.size(); ++m)
      offset[m] = ens.particles[m].params.beta / traj.beta0;
  }

  ForecastResult result;
  result.ensemble_size = static_cast<int>(ens.particles.size());
  result.forecast_day = checkpoint.day;
  result.origin_date = origin_date;
  result.days.resize(k);

  std::uint64_t base = rng.next_u64();
  std::vector<SirState> states(ens.particles.size());
  for (std::size_t m = 0; m < ens.particles.size(); ++m) states[m] = ens.particles[m].state;
  for (int d = 1; d <= k; ++d) {
    for (std::size_t m = 0; m < states.size(); ++m) {
      Rng sub(seed_for(base, static_cast<std::uint64_t>(d), m));
      SirParams params{std::max(0.0, traj.beta[d - 1] * offset[m]),
                       ens.particles[m].params.gamma};
      states[m] = step(states[m], params, ens.population, noise, sub);
    }
    result.days[d - 1].date = origin_date + d;
    detail::summarize_forecast_day(states, result.days[d - 1]);
  }
  return result;
}

struct MapeResult {
  double value = 0.0;          // percent
  std::vector<int> skipped;    // 1-based horizon days with actual == 0
};

// Mean absolute percentage error over the horizon. Days with a zero actual
// cannot be scored; they are skipped and reported, and the average runs over
// the scored days only.
inline MapeResult mape(const std::vector<double>& forecast_i, const std::vector<double>& actual_i) {
  if (forecast_i.size() != actual_i.size() || forecast_i.empty())
    throw Error::data("invalid-input: forecast and actual series must have equal length >= 1");
  MapeResult out;
  double sum = 0.0;
  int scored = 0;
  for (std::size_t d = 0; d < actual_i.size(); ++d) {
    if (actual_i[d] == 0.0) {
      out.skipped.push_back(static_cast<int>(d) + 1);
      continue;
    }
    sum += std::fabs(forecast_i[d] - actual_i[d]) / actual_i[d];
    ++scored;
  }
  if (scored == 0) throw Error::numeric("undefined-mape: every actual value is zero");
  out.value = 100.0 * sum / static_cast<double>(scored);
  return out;
}

inline std::string forecast_to_csv(const ForecastResult& result) {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  std::string out = "date,i_mean,i_std,i_q05,i_q95,r_mean,r_std,r_q05,r_q95\n";
  for (const auto& d : result.days) {
    out += d.date.iso();
    for (double v : {d.i_mean, d.i_std, d.i_q05, d.i_q95, d.r_mean, d.r_std, d.r_q05, d.r_q95})
      out += ',' + fmt(v);
    out += '\n';
  }
  return out;
}

}  // namespace epiwave
