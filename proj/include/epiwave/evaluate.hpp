#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "epiwave/errors.hpp"
#include "epiwave/forecast.hpp"
#include "epiwave/mast.hpp"
#include "epiwave/particle_filter.hpp"
#include "epiwave/rng.hpp"
#include "epiwave/series.hpp"

namespace epiwave {

struct EvalOptions {
  int detector_window = 7;  // trailing smoothing applied to the detector input
  int sigma_window = 20;
  double threshold = 0.0;  // calibrated MAST threshold
  int detect_start = 0;    // series index where the detector starts watching
  Regime initial_regime = Regime::controlled;
  int ensemble_size = 5000;
  NoiseConfig noise;
  ObsModel obs_model;
  PriorRanges prior;
  int rise_days = 15;
  int fall_days = 30;
  std::vector<int> horizons = {14, 28, 56};
  int origin_stride = 1;
  std::uint64_t seed = 0;
};

struct EvalRow {
  Date origin_date;
  int origin_day = 0;
  ScenarioKind scenario = ScenarioKind::A;
  int horizon_days = 0;
  double mape_pct = 0.0;
  Regime regime = Regime::controlled;
  double slope = 0.0;
};

struct EvalOmission {
  Date origin_date;
  int origin_day = 0;
  ScenarioKind scenario = ScenarioKind::A;
  int horizon_days = 0;
  std::string reason;
};

struct EvalSummary {
  ScenarioKind scenario = ScenarioKind::A;
  int horizon_days = 0;
  double mape_pct = 0.0;  // time average over scored origins
  int origins = 0;
};

struct EvalReport {
  RegimeTimeline timeline;
  PosteriorSummary posterior;
  std::vector<EvalRow> rows;
  std::vector<EvalOmission> omissions;
  std::vector<EvalSummary> summaries;
};

inline RegimeKind to_regime_kind(Regime r) {
  return r == Regime::critical ? RegimeKind::critical : RegimeKind::controlled;
}

struct OriginContext {
  Regime regime = Regime::controlled;
  int since_day = 0;  // series index of the last declared change at or before the origin
  double slope = 0.0;
};

// Regime and slope baseline at a forecast origin: the slope averages the
// daily posterior-beta changes since the last declared regime change, and is
// zero on the declaration day itself.
inline OriginContext origin_context(const RegimeTimeline& timeline, const std::vector<Date>& dates,
                                    const std::vector<double>& beta_means, int d) {
  if (timeline.events.empty())
    throw Error::data("no-detection: no regime change declared before this origin");
  int since = timeline.events.front().date - dates.front();
  if (d < since)
    throw Error::data("origin-before-detection: origin precedes the first declared change");
  for (const auto& ev : timeline.events) {
    int day = ev.date - dates.front();
    if (day <= d) since = day;
  }
  OriginContext ctx;
  ctx.regime = timeline.regime_at(dates[d]);
  ctx.since_day = since;
  ctx.slope =
      d == since ? 0.0 : estimate_slope(beta_means, since, d, to_regime_kind(ctx.regime));
  return ctx;
}

namespace detail {

inline void validate_eval_options(const EpidemicSeries& series, const EvalOptions& opts) {
  if (opts.horizons.empty()) throw Error::config("horizons list must not be empty");
  for (int h : opts.horizons)
    if (h < 1) throw Error::config("horizons must be >= 1 days");
  if (opts.origin_stride < 1) throw Error::config("origin stride must be >= 1");
  if (opts.origin_stride > static_cast<int>(series.size()))
    throw Error::config("origin stride exceeds series length");
  if (!(opts.threshold > 0.0)) throw Error::config("threshold must be > 0");
}

}  // namespace detail

// Full pipeline sweep: detect regime changes on the smoothed series, learn the
// posterior day by day, then forecast from every origin (stride-spaced) at or
// after the first detection under both scenarios, scoring each horizon whose
// actuals are fully observed. Origins whose horizon overruns the series end
// are logged as omissions rather than scored.
inline EvalReport rolling_evaluate(const EpidemicSeries& series, const EvalOptions& opts) {
  detail::validate_eval_options(series, opts);

  EvalReport report;

  EpidemicSeries detector_input = smooth(series, opts.detector_window, SmoothMode::trailing);
  GrowthSeries growth =
      growth_rate(detector_input.dates, detector_input.new_positives, opts.sigma_window);
  DetectorResult det =
      run_detector(growth, opts.threshold, opts.initial_regime, opts.detect_start);
  report.timeline = det.timeline;
  if (det.timeline.events.empty())
    throw Error::data("no-detection: detector declared no regime change; nothing to evaluate");

  Rng filter_rng(seed_for(opts.seed, "filter"));
  FilterResult filter = run_filter(series, opts.prior, opts.ensemble_size, opts.noise,
                                   opts.obs_model, filter_rng);
  report.posterior = filter.summary;
  std::vector<double> beta_means = filter.summary.beta_means();

  std::vector<int> event_days;
  event_days.reserve(det.timeline.events.size());
  for (const auto& ev : det.timeline.events)
    event_days.push_back(ev.date - series.dates.front());

  const int last = static_cast<int>(series.size()) - 1;
  const std::uint64_t forecast_base = seed_for(opts.seed, "forecast");

  for (int d = event_days.front(); d <= last; d += opts.origin_stride) {
    OriginContext ctx = origin_context(report.timeline, series.dates, beta_means, d);
    Regime regime = ctx.regime;
    double slope = ctx.slope;

    int k_star = 0;
    for (int h : opts.horizons)
      if (d + h <= last) k_star = std::max(k_star, h);

    for (ScenarioKind kind : {ScenarioKind::A, ScenarioKind::B}) {
      if (k_star == 0) {
        for (int h : opts.horizons)
          report.omissions.push_back({series.dates[d], d, kind, h, "horizon-exceeds-series"});
        continue;
      }
      ScenarioSpec spec;
      spec.kind = kind;
      spec.rise_days = opts.rise_days;
      spec.fall_days = opts.fall_days;
      spec.slope = slope;
      spec.beta0 = filter.summary.days[d].beta.mean;
      spec.gamma0 = filter.summary.days[d].gamma.mean;
      BetaTrajectory traj = build_scenario(spec, k_star);

      Rng forecast_rng(seed_for(forecast_base, static_cast<std::uint64_t>(d),
                                kind == ScenarioKind::A ? 0 : 1));
      ForecastResult fc = ensemble_forecast(filter.checkpoints[d], traj, opts.noise, k_star,
                                            forecast_rng, series.dates[d]);

      for (int h : opts.horizons) {
        if (d + h > last) {
          report.omissions.push_back({series.dates[d], d, kind, h, "horizon-exceeds-series"});
          continue;
        }
        std::vector<double> fm(h), actual(h);
        for (int j = 0; j < h; ++j) {
          fm[j] = fc.days[j].i_mean;
          actual[j] = series.infected[d + 1 + j];
        }
        try {
          MapeResult m = mape(fm, actual);
          report.rows.push_back({series.dates[d], d, kind, h, m.value, regime, slope});
        } catch (const Error&) {
          report.omissions.push_back({series.dates[d], d, kind, h, "undefined-mape"});
        }
      }
    }
  }

  if (report.rows.empty())
    throw Error::data("insufficient-data: no origin admits any forecast horizon");

  for (ScenarioKind kind : {ScenarioKind::A, ScenarioKind::B}) {
    for (int h : opts.horizons) {
      double sum = 0.0;
      int n = 0;
      for (const auto& row : report.rows) {
        if (row.scenario == kind && row.horizon_days == h) {
          sum += row.mape_pct;
          ++n;
        }
      }
      if (n > 0) report.summaries.push_back({kind, h, sum / n, n});
    }
  }
  return report;
}

inline std::string eval_to_csv(const EvalReport& report) {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  std::string out = "origin_date,scenario,horizon_days,mape_pct,regime,slope\n";
  for (const auto& row : report.rows) {
    out += row.origin_date.iso();
    out += ',';
    out += to_string(row.scenario);
    out += ',' + std::to_string(row.horizon_days);
    out += ',' + fmt(row.mape_pct);
    out += ',';
    out += to_string(row.regime);
    out += ',' + fmt(row.slope);
    out += '\n';
  }
  return out;
}

}  // namespace epiwave
