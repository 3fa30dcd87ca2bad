#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "epiwave/dates.hpp"
#include "epiwave/errors.hpp"
#include "epiwave/rng.hpp"

namespace epiwave {

// Daily growth rate of the (smoothed) new-positive counts, paired with a
// sliding-window estimate of its standard deviation. x[k] is defined for
// k >= 1; sigma[k] needs at least two ratios, so index 1 borrows the first
// computable estimate.
struct GrowthSeries {
  std::vector<Date> dates;
  std::vector<double> x;      // x[k] = p[k] / p[k-1], x[0] unused (set to 1)
  std::vector<double> sigma;  // windowed sample std of x, floored
  int first_usable = 0;       // earliest index with both x and sigma defined

  std::size_t size() const { return dates.size(); }
};

enum class Direction { onset, termination };

inline const char* to_string(Direction d) {
  return d == Direction::onset ? "onset" : "termination";
}

struct MastState {
  double t = 0.0;  // decision statistic, never negative
  Direction direction = Direction::onset;
  int start_day = 0;      // index the statistic was (re)initialized at
  double threshold = 0.0; // h
};

enum class Regime { controlled, critical };

inline const char* to_string(Regime r) { return r == Regime::controlled ? "controlled" : "critical"; }

struct RegimeEvent {
  Date date;
  Direction kind;  // onset-declared or termination-declared
};

struct RegimeTimeline {
  Regime initial_regime = Regime::controlled;
  std::vector<RegimeEvent> events;  // strictly alternating onset/termination

  Regime regime_at(Date day) const {
    Regime r = initial_regime;
    for (const auto& e : events) {
      if (day < e.date) break;
      r = e.kind == Direction::onset ? Regime::critical : Regime::controlled;
    }
    return r;
  }
};

// One watch episode of the detector: the statistic trace from the day the
// watch started until it crossed the threshold (or the series ended).
struct StatisticTrace {
  int episode = 0;
  Direction direction = Direction::onset;
  std::vector<Date> dates;
  std::vector<double> t;
  double threshold = 0.0;
};

constexpr double kSigmaFloor = 1e-4;

// Ratios of consecutive smoothed counts plus the windowed std estimate.
// The denominator floor keeps the ratio defined through quiet stretches.
inline GrowthSeries growth_rate(const std::vector<Date>& dates,
                                const std::vector<double>& p_smoothed, int window_sigma,
                                double denom_floor = 1.0) {
  if (window_sigma < 5) throw Error::data("invalid-window: sigma window must be >= 5");
  if (p_smoothed.size() < static_cast<std::size_t>(window_sigma) + 1)
    throw Error::data("insufficient-data: need at least sigma window + 1 samples");
  if (dates.size() != p_smoothed.size())
    throw Error::data("invalid-input: dates and counts differ in length");

  const std::size_t n = p_smoothed.size();
  GrowthSeries g;
  g.dates = dates;
  g.x.assign(n, 1.0);
  g.sigma.assign(n, kSigmaFloor);
  for (std::size_t k = 1; k < n; ++k) {
    double num = std::max(p_smoothed[k], denom_floor);
    double den = std::max(p_smoothed[k - 1], denom_floor);
    g.x[k] = num / den;
  }
  for (std::size_t k = 2; k < n; ++k) {
    std::size_t lo = k + 1 >= static_cast<std::size_t>(window_sigma) + 1
                         ? k + 1 - static_cast<std::size_t>(window_sigma)
                         : 1;
    double mean = 0.0;
    std::size_t m = k - lo + 1;
    for (std::size_t j = lo; j <= k; ++j) mean += g.x[j];
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t j = lo; j <= k; ++j) ss += (g.x[j] - mean) * (g.x[j] - mean);
    g.sigma[k] = std::max(kSigmaFloor, std::sqrt(ss / static_cast<double>(m - 1)));
  }
  if (n > 2) g.sigma[1] = g.sigma[2];
  g.first_usable = 1;
  return g;
}

// One-sided log-likelihood-ratio increment for a Gaussian growth rate with
// the unknown mean constrained to > 1 (onset watch) or <= 1. Positive
// deviations above 1 push an onset statistic up quadratically; the
// termination increment is the exact sign flip.
inline double mast_increment(double x_k, double sigma_k, Direction direction) {
  if (!(sigma_k > 0.0)) throw Error::data("invalid-sigma: sigma must be positive");
  double up = std::max(x_k - 1.0, 0.0);
  double down = std::max(1.0 - x_k, 0.0);
  double ell = (up * up - down * down) / (2.0 * sigma_k * sigma_k);
  return direction == Direction::onset ? ell : -ell;
}

// CUSUM recursion: accumulate the increment, floored at zero.
inline MastState mast_update(const MastState& state, double x_k, double sigma_k) {
  MastState out = state;
  out.t = std::max(0.0, state.t + mast_increment(x_k, sigma_k, state.direction));
  return out;
}

struct CalibratedThreshold {
  double h = 0.0;
  double mean_false_alarm_time = 0.0;  // estimated at h, in days
  double std_error = 0.0;
  int trials = 0;
};

// Monte Carlo calibration under the null (growth rate Gaussian with mean 1):
// finds the smallest grid threshold whose estimated mean time to first
// crossing reaches 1/risk. The increment is scale-free under this null, so
// the result depends on the risk alone; sigma_profile fixes the simulated
// scale and is cycled when shorter than a trial.
inline CalibratedThreshold calibrate_threshold(double risk, const std::vector<double>& sigma_profile,
                                               int trials, long max_days, Rng& rng,
                                               double grid_step = 0.25, double h_max = 0.0) {
  if (!(risk > 0.0) || risk > 1.0) throw Error::data("invalid-input: risk must be in (0, 1]");
  if (trials < 100) throw Error::data("invalid-input: need at least 100 calibration trials");
  if (sigma_profile.empty()) throw Error::data("invalid-sigma: sigma profile is empty");
  for (double s : sigma_profile)
    if (!(s > 0.0)) throw Error::data("invalid-sigma: sigma must be positive");

  const double target = 1.0 / risk;
  if (h_max <= 0.0) h_max = 1.4 * std::sqrt(0.75 * target) + 20.0;
  const std::size_t levels = static_cast<std::size_t>(h_max / grid_step) + 2;

  // first_cross[l][i]: day trial i first exceeded grid level l (censored at
  // max_days). Grid levels are nested, so one pass per trial covers all.
  std::vector<double> sum_t(levels, 0.0), sum_t2(levels, 0.0);
  std::vector<long> censored(levels, 0);
  for (int trial = 0; trial < trials; ++trial) {
    double t = 0.0;
    std::size_t level = 0;
    long day = 0;
    while (level < levels && day < max_days) {
      ++day;
      double sigma = sigma_profile[(day - 1) % sigma_profile.size()];
      double x = 1.0 + rng.normal(0.0, sigma);
      t = std::max(0.0, t + mast_increment(x, sigma, Direction::onset));
      while (level < levels && t > level * grid_step) {
        sum_t[level] += static_cast<double>(day);
        sum_t2[level] += static_cast<double>(day) * static_cast<double>(day);
        ++level;
      }
    }
    for (std::size_t l = level; l < levels; ++l) {
      sum_t[l] += static_cast<double>(max_days);
      sum_t2[l] += static_cast<double>(max_days) * static_cast<double>(max_days);
      ++censored[l];
    }
  }

  for (std::size_t l = 0; l < levels; ++l) {
    double mean = sum_t[l] / trials;
    if (mean >= target) {
      if (censored[l] > trials / 10)
        throw Error::numeric("calibration-infeasible: estimate at h=" +
                             std::to_string(l * grid_step) + " dominated by censored trials");
      double var = std::max(0.0, sum_t2[l] / trials - mean * mean);
      CalibratedThreshold out;
      out.h = l * grid_step;
      out.mean_false_alarm_time = mean;
      out.std_error = std::sqrt(var / trials);
      out.trials = trials;
      return out;
    }
  }
  double best = sum_t[levels - 1] / trials;
  throw Error::numeric("calibration-infeasible: best bound " + std::to_string(best) +
                       " days at h=" + std::to_string((levels - 1) * grid_step) +
                       " is below target " + std::to_string(target));
}

struct DetectorResult {
  RegimeTimeline timeline;
  std::vector<StatisticTrace> traces;
};

// Walks the growth series from start_index keeping one active watch: an
// onset watch while the regime is controlled, a termination watch while it
// is critical. A crossing declares the event, resets the statistic and
// inverts the watch from the next day.
inline DetectorResult run_detector(const GrowthSeries& growth, double threshold,
                                   Regime initial_regime, int start_index) {
  if (!(threshold > 0.0)) throw Error::data("invalid-input: threshold must be positive");
  if (start_index < growth.first_usable) start_index = growth.first_usable;
  if (static_cast<std::size_t>(start_index) >= growth.size())
    throw Error::data("insufficient-data: start index beyond series end");

  DetectorResult result;
  result.timeline.initial_regime = initial_regime;
  Regime regime = initial_regime;

  MastState state;
  state.direction = regime == Regime::controlled ? Direction::onset : Direction::termination;
  state.start_day = start_index;
  state.threshold = threshold;

  StatisticTrace trace;
  trace.episode = 0;
  trace.direction = state.direction;
  trace.threshold = threshold;

  for (std::size_t k = static_cast<std::size_t>(start_index); k < growth.size(); ++k) {
    state = mast_update(state, growth.x[k], growth.sigma[k]);
    trace.dates.push_back(growth.dates[k]);
    trace.t.push_back(state.t);
    if (state.t > threshold) {
      result.timeline.events.push_back({growth.dates[k], state.direction});
      result.traces.push_back(std::move(trace));
      regime = state.direction == Direction::onset ? Regime::critical : Regime::controlled;
      state.t = 0.0;
      state.direction = regime == Regime::controlled ? Direction::onset : Direction::termination;
      state.start_day = static_cast<int>(k) + 1;
      trace = StatisticTrace{};
      trace.episode = static_cast<int>(result.traces.size());
      trace.direction = state.direction;
      trace.threshold = threshold;
    }
  }
  if (!trace.dates.empty()) result.traces.push_back(std::move(trace));
  return result;
}

inline std::string traces_to_csv(const std::vector<StatisticTrace>& traces) {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  std::string out = "date,episode,direction,t,threshold\n";
  for (const auto& tr : traces) {
    for (std::size_t k = 0; k < tr.dates.size(); ++k) {
      out += tr.dates[k].iso();
      out += ',' + std::to_string(tr.episode);
      out += ',';
      out += to_string(tr.direction);
      out += ',' + fmt(tr.t[k]) + ',' + fmt(tr.threshold);
      out += '\n';
    }
  }
  return out;
}

}  // namespace epiwave
