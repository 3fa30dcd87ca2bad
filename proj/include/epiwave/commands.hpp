#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "epiwave/config.hpp"
#include "epiwave/csv.hpp"
#include "epiwave/dates.hpp"
#include "epiwave/errors.hpp"
#include "epiwave/evaluate.hpp"
#include "epiwave/forecast.hpp"
#include "epiwave/mast.hpp"
#include "epiwave/particle_filter.hpp"
#include "epiwave/rng.hpp"
#include "epiwave/series.hpp"

namespace epiwave {

struct IngestResult {
  EpidemicSeries series;
  RepairLog log;
};

inline IngestResult ingest_series(const PipelineConfig& cfg) {
  IngestResult out;
  if (!cfg.series_csv.empty()) {
    out.series = series_from_csv(read_file(cfg.series_csv), cfg.population);
    return out;
  }
  ParseResult parsed = parse_jhu_triple(read_file(cfg.confirmed_csv), read_file(cfg.recovered_csv),
                                        read_file(cfg.deaths_csv), cfg.region);
  out.log = parsed.log;
  out.series = build_epidemic_series(parsed.series, cfg.population);
  return out;
}

struct DetectArtifacts {
  GrowthSeries growth;
  CalibratedThreshold threshold;
  DetectorResult det;
  int start_index = 0;
};

inline int resolve_start_index(const PipelineConfig& cfg, const std::vector<Date>& dates) {
  if (cfg.detect_start.empty()) return 0;
  Date start = parse_date(cfg.detect_start);
  for (std::size_t k = 0; k < dates.size(); ++k)
    if (dates[k].serial == start.serial) return static_cast<int>(k);
  throw Error::config("start_date " + cfg.detect_start + " is outside the ingested series");
}

inline DetectArtifacts detect_series(const PipelineConfig& cfg, const EpidemicSeries& series) {
  DetectArtifacts out;
  EpidemicSeries detector_input = smooth(series, cfg.detector_window, SmoothMode::trailing);
  out.growth = growth_rate(detector_input.dates, detector_input.new_positives, cfg.sigma_window);
  std::vector<double> sigma_profile(out.growth.sigma.begin() + out.growth.first_usable,
                                    out.growth.sigma.end());
  Rng calib_rng(seed_for(cfg.seed, "calibrate"));
  long budget = static_cast<long>(std::min(1e8, 20.0 / cfg.risk));
  out.threshold = calibrate_threshold(cfg.risk, sigma_profile, cfg.calibration_trials, budget,
                                      calib_rng);
  out.start_index = resolve_start_index(cfg, series.dates);
  out.det = run_detector(out.growth, out.threshold.h, cfg.initial_regime, out.start_index);
  return out;
}

inline FilterResult learn_series(const PipelineConfig& cfg, const EpidemicSeries& series) {
  Rng filter_rng(seed_for(cfg.seed, "filter"));
  return run_filter(series, cfg.prior, cfg.ensemble_size, cfg.noise, cfg.obs_model, filter_rng);
}

namespace detail {

inline std::string out_path(const PipelineConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

inline nlohmann::ordered_json events_json(const DetectArtifacts& art,
                                          const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["risk"] = cfg.risk;
  j["threshold"] = art.threshold.h;
  j["mean_false_alarm_time"] = art.threshold.mean_false_alarm_time;
  j["calibration_trials"] = art.threshold.trials;
  j["start_date"] = art.growth.dates[art.start_index].iso();
  j["initial_regime"] = to_string(art.det.timeline.initial_regime);
  j["events"] = nlohmann::ordered_json::array();
  for (const auto& ev : art.det.timeline.events) {
    nlohmann::ordered_json e;
    e["date"] = ev.date.iso();
    e["kind"] = to_string(ev.kind);
    j["events"].push_back(e);
  }
  return j;
}

}  // namespace detail

// ingest: parse, repair, build, and write the working and display series.
inline IngestResult run_ingest(const PipelineConfig& cfg) {
  IngestResult result = ingest_series(cfg);
  write_file(detail::out_path(cfg, "series.csv"), series_to_csv(result.series));
  EpidemicSeries display = smooth(result.series, cfg.display_window, SmoothMode::centered);
  write_file(detail::out_path(cfg, "series_display.csv"), series_to_csv(display));
  return result;
}

// detect: calibrate the threshold, run the detector, write events + traces.
inline DetectArtifacts run_detect(const PipelineConfig& cfg) {
  IngestResult ingest = ingest_series(cfg);
  DetectArtifacts art = detect_series(cfg, ingest.series);
  write_file(detail::out_path(cfg, "events.json"), detail::events_json(art, cfg).dump(2) + "\n");
  write_file(detail::out_path(cfg, "traces.csv"), traces_to_csv(art.det.traces));
  return art;
}

struct ForecastCommandResult {
  ForecastResult forecast;
  OriginContext context;
  ScenarioKind scenario = ScenarioKind::A;
  int horizon = 0;
  std::string csv_path;
  std::string meta_path;
};

// forecast: one scenario from one origin day. Origins before the first
// detection have no slope baseline and are refused unless forced (the slope
// is then zero).
inline ForecastCommandResult run_forecast(const PipelineConfig& cfg, const std::string& origin_iso,
                                          ScenarioKind scenario, int horizon = 0,
                                          bool force = false) {
  IngestResult ingest = ingest_series(cfg);
  const EpidemicSeries& series = ingest.series;

  Date origin = parse_date(origin_iso);
  int origin_day = -1;
  for (std::size_t k = 0; k < series.size(); ++k)
    if (series.dates[k].serial == origin.serial) origin_day = static_cast<int>(k);
  if (origin_day < 0)
    throw Error::config("origin " + origin_iso + " is outside the ingested series");

  DetectArtifacts det = detect_series(cfg, series);
  FilterResult filter = learn_series(cfg, series);
  std::vector<double> beta_means = filter.summary.beta_means();

  OriginContext ctx;
  int first_event = det.det.timeline.events.empty()
                        ? -1
                        : det.det.timeline.events.front().date - series.dates.front();
  if (first_event < 0 || origin_day < first_event) {
    if (!force)
      throw Error::config(
          "origin-before-detection: no declared change at or before " + origin_iso +
          "; pass --force to forecast with slope 0");
    ctx.regime = det.det.timeline.regime_at(series.dates[origin_day]);
    ctx.since_day = origin_day;
    ctx.slope = 0.0;
  } else {
    ctx = origin_context(det.det.timeline, series.dates, beta_means, origin_day);
  }

  if (horizon <= 0)
    horizon = *std::max_element(cfg.horizons.begin(), cfg.horizons.end());

  ScenarioSpec spec;
  spec.kind = scenario;
  spec.rise_days = cfg.rise_days;
  spec.fall_days = cfg.fall_days;
  spec.slope = ctx.slope;
  spec.beta0 = filter.summary.days[origin_day].beta.mean;
  spec.gamma0 = filter.summary.days[origin_day].gamma.mean;
  BetaTrajectory traj = build_scenario(spec, horizon);

  Rng forecast_rng(seed_for(seed_for(cfg.seed, "forecast"),
                            static_cast<std::uint64_t>(origin_day),
                            scenario == ScenarioKind::A ? 0 : 1));
  ForecastCommandResult out;
  out.forecast = ensemble_forecast(filter.checkpoints[origin_day], traj, cfg.noise, horizon,
                                   forecast_rng, series.dates[origin_day]);
  out.context = ctx;
  out.scenario = scenario;
  out.horizon = horizon;

  std::string stem = "forecast_" + origin_iso + "_" + to_string(scenario);
  out.csv_path = detail::out_path(cfg, stem + ".csv");
  out.meta_path = detail::out_path(cfg, stem + "_meta.json");
  write_file(out.csv_path, forecast_to_csv(out.forecast));

  nlohmann::ordered_json meta;
  meta["origin"] = origin_iso;
  meta["scenario"] = to_string(scenario);
  meta["horizon_days"] = horizon;
  meta["ensemble_size"] = out.forecast.ensemble_size;
  meta["seed"] = cfg.seed;
  meta["regime"] = to_string(ctx.regime);
  meta["slope"] = ctx.slope;
  meta["beta0"] = spec.beta0;
  meta["gamma0"] = spec.gamma0;
  write_file(out.meta_path, meta.dump(2) + "\n");
  return out;
}

// evaluate: the full rolling-origin sweep; writes the report, its summary,
// the posterior track, and the detection artifacts.
inline EvalReport run_evaluate(const PipelineConfig& cfg) {
  IngestResult ingest = ingest_series(cfg);
  DetectArtifacts det = detect_series(cfg, ingest.series);

  EvalOptions opts;
  opts.detector_window = cfg.detector_window;
  opts.sigma_window = cfg.sigma_window;
  opts.threshold = det.threshold.h;
  opts.detect_start = det.start_index;
  opts.initial_regime = cfg.initial_regime;
  opts.ensemble_size = cfg.ensemble_size;
  opts.noise = cfg.noise;
  opts.obs_model = cfg.obs_model;
  opts.prior = cfg.prior;
  opts.rise_days = cfg.rise_days;
  opts.fall_days = cfg.fall_days;
  opts.horizons = cfg.horizons;
  opts.origin_stride = cfg.origin_stride;
  opts.seed = cfg.seed;

  EvalReport report = rolling_evaluate(ingest.series, opts);

  write_file(detail::out_path(cfg, "eval.csv"), eval_to_csv(report));
  write_file(detail::out_path(cfg, "posterior.csv"), posterior_to_csv(report.posterior));
  write_file(detail::out_path(cfg, "events.json"), detail::events_json(det, cfg).dump(2) + "\n");
  write_file(detail::out_path(cfg, "traces.csv"), traces_to_csv(det.det.traces));

  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["rows"] = report.rows.size();
  j["omissions"] = report.omissions.size();
  j["time_averaged_mape"] = nlohmann::ordered_json::array();
  for (const auto& s : report.summaries) {
    nlohmann::ordered_json e;
    e["scenario"] = to_string(s.scenario);
    e["horizon_days"] = s.horizon_days;
    e["mape_pct"] = s.mape_pct;
    e["origins"] = s.origins;
    j["time_averaged_mape"].push_back(e);
  }
  write_file(detail::out_path(cfg, "eval_summary.json"), j.dump(2) + "\n");
  return report;
}

inline PipelineConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

}  // namespace epiwave
