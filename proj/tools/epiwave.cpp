#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "epiwave/commands.hpp"

namespace {

int exit_code(epiwave::ErrorKind kind) {
  switch (kind) {
    case epiwave::ErrorKind::config: return 2;
    case epiwave::ErrorKind::data: return 3;
    case epiwave::ErrorKind::numeric: return 4;
  }
  return 1;
}

void print_events(const epiwave::DetectArtifacts& art) {
  std::printf("threshold %.4f (risk %.3g, mean false-alarm time %.0f days)\n", art.threshold.h,
              1.0 / std::max(1.0, art.threshold.mean_false_alarm_time),
              art.threshold.mean_false_alarm_time);
  if (art.det.timeline.events.empty()) {
    std::printf("no regime change declared\n");
    return;
  }
  for (const auto& ev : art.det.timeline.events)
    std::printf("%s  %s\n", ev.date.iso().c_str(), epiwave::to_string(ev.kind));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epidemic wave detection, estimation, and forecasting"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path, "pipeline config file (JSON)")->required();

  auto* ingest = app.add_subcommand("ingest", "parse, repair, and write the series files");
  auto* detect = app.add_subcommand("detect", "calibrate the threshold and run the detector");

  auto* forecast = app.add_subcommand("forecast", "ensemble forecast from one origin day");
  std::string origin;
  std::string scenario = "A";
  int horizon = 0;
  bool force = false;
  forecast->add_option("--origin", origin, "origin date, YYYY-MM-DD")->required();
  forecast->add_option("--scenario", scenario, "A or B")->check(CLI::IsMember({"A", "B"}));
  forecast->add_option("--horizon", horizon, "days ahead (default: largest configured horizon)");
  forecast->add_flag("--force", force, "allow origins before the first detection (slope 0)");

  auto* evaluate = app.add_subcommand("evaluate", "rolling-origin forecast scoring");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    epiwave::PipelineConfig cfg = epiwave::load_config(config_path);
    if (*ingest) {
      epiwave::IngestResult r = epiwave::run_ingest(cfg);
      std::printf("series: %zu days, %s to %s\n", r.series.size(),
                  r.series.dates.front().iso().c_str(), r.series.dates.back().iso().c_str());
      std::printf("repairs: %zu\n", r.log.size());
    } else if (*detect) {
      print_events(epiwave::run_detect(cfg));
    } else if (*forecast) {
      auto kind = scenario == "A" ? epiwave::ScenarioKind::A : epiwave::ScenarioKind::B;
      epiwave::ForecastCommandResult r = epiwave::run_forecast(cfg, origin, kind, horizon, force);
      std::printf("origin %s scenario %s horizon %d regime %s slope %.6g\n", origin.c_str(),
                  scenario.c_str(), r.horizon, epiwave::to_string(r.context.regime),
                  r.context.slope);
      std::printf("wrote %s\n", r.csv_path.c_str());
    } else if (*evaluate) {
      epiwave::EvalReport rep = epiwave::run_evaluate(cfg);
      for (const auto& s : rep.summaries)
        std::printf("scenario %s horizon %2d: mean MAPE %.2f%% over %d origins\n",
                    epiwave::to_string(s.scenario), s.horizon_days, s.mape_pct, s.origins);
      std::printf("rows %zu, omissions %zu\n", rep.rows.size(), rep.omissions.size());
    }
    return 0;
  } catch (const epiwave::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
