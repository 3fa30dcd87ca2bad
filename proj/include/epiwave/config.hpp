#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "epiwave/errors.hpp"
#include "epiwave/mast.hpp"
#include "epiwave/particle_filter.hpp"
#include "epiwave/sir.hpp"

namespace epiwave {

// Every knob of the pipeline in one declarative file. All randomness flows
// from the single root seed, which is therefore mandatory.
struct PipelineConfig {
  // data
  std::string series_csv;  // prepared series file, or:
  std::string confirmed_csv, recovered_csv, deaths_csv;
  std::string region;
  double population = 0.0;

  // smoothing
  int display_window = 21;
  int detector_window = 7;

  // detector
  int sigma_window = 20;
  double risk = 1e-4;
  int calibration_trials = 2000;
  std::string detect_start;  // ISO date; empty = first usable day
  Regime initial_regime = Regime::controlled;

  // learner
  int ensemble_size = 5000;
  NoiseConfig noise{0.0, 0.015, 0.004};
  ObsModel obs_model;
  PriorRanges prior;

  // forecast + evaluation
  int rise_days = 15;
  int fall_days = 30;
  std::vector<int> horizons = {14, 28, 56};
  int origin_stride = 1;

  std::uint64_t seed = 0;
  std::string out_dir = "out";
};

namespace detail {

inline void require_keys(const nlohmann::json& obj, const char* section,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok)
      throw Error::config(std::string("unknown config key '") + key + "' in " + section);
  }
}

template <typename T>
inline void read_if(const nlohmann::json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error::config(std::string("config key '") + key + "' has the wrong type");
    }
  }
}

inline void read_range(const nlohmann::json& obj, const char* key, double& lo, double& hi) {
  if (!obj.contains(key)) return;
  const auto& arr = obj.at(key);
  if (!arr.is_array() || arr.size() != 2)
    throw Error::config(std::string("prior '") + key + "' must be a [lo, hi] pair");
  lo = arr[0].get<double>();
  hi = arr[1].get<double>();
}

}  // namespace detail

inline void validate(const PipelineConfig& cfg);

inline PipelineConfig parse_config(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error::config(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error::config("config root must be an object");
  detail::require_keys(root, "config root",
                       {"data", "smoothing", "detector", "learner", "forecast", "evaluate",
                        "seed", "out_dir"});

  PipelineConfig cfg;
  using detail::read_if;

  if (root.contains("data")) {
    const auto& d = root.at("data");
    detail::require_keys(d, "data",
                         {"series_csv", "confirmed_csv", "recovered_csv", "deaths_csv",
                          "region", "population"});
    read_if(d, "series_csv", cfg.series_csv);
    read_if(d, "confirmed_csv", cfg.confirmed_csv);
    read_if(d, "recovered_csv", cfg.recovered_csv);
    read_if(d, "deaths_csv", cfg.deaths_csv);
    read_if(d, "region", cfg.region);
    read_if(d, "population", cfg.population);
  }
  if (root.contains("smoothing")) {
    const auto& s = root.at("smoothing");
    detail::require_keys(s, "smoothing", {"display_window", "detector_window"});
    read_if(s, "display_window", cfg.display_window);
    read_if(s, "detector_window", cfg.detector_window);
  }
  if (root.contains("detector")) {
    const auto& det = root.at("detector");
    detail::require_keys(det, "detector",
                         {"sigma_window", "risk", "calibration_trials", "start_date",
                          "initial_regime"});
    read_if(det, "sigma_window", cfg.sigma_window);
    read_if(det, "risk", cfg.risk);
    read_if(det, "calibration_trials", cfg.calibration_trials);
    read_if(det, "start_date", cfg.detect_start);
    std::string regime;
    read_if(det, "initial_regime", regime);
    if (regime == "critical") cfg.initial_regime = Regime::critical;
    else if (regime == "controlled" || regime.empty()) cfg.initial_regime = Regime::controlled;
    else throw Error::config("initial_regime must be 'controlled' or 'critical'");
  }
  if (root.contains("learner")) {
    const auto& l = root.at("learner");
    detail::require_keys(l, "learner",
                         {"ensemble_size", "state_noise_std", "beta_walk_std", "gamma_walk_std",
                          "obs_infected_std", "obs_removed_std", "obs_relative", "obs_floor",
                          "prior"});
    read_if(l, "ensemble_size", cfg.ensemble_size);
    read_if(l, "state_noise_std", cfg.noise.state_noise_std);
    read_if(l, "beta_walk_std", cfg.noise.beta_walk_std);
    read_if(l, "gamma_walk_std", cfg.noise.gamma_walk_std);
    read_if(l, "obs_infected_std", cfg.obs_model.infected_noise_std);
    read_if(l, "obs_removed_std", cfg.obs_model.removed_noise_std);
    read_if(l, "obs_relative", cfg.obs_model.relative);
    read_if(l, "obs_floor", cfg.obs_model.floor);
    if (l.contains("prior")) {
      const auto& p = l.at("prior");
      detail::require_keys(p, "learner.prior", {"i", "r", "beta", "gamma"});
      detail::read_range(p, "i", cfg.prior.i_lo, cfg.prior.i_hi);
      detail::read_range(p, "r", cfg.prior.r_lo, cfg.prior.r_hi);
      detail::read_range(p, "beta", cfg.prior.beta_lo, cfg.prior.beta_hi);
      detail::read_range(p, "gamma", cfg.prior.gamma_lo, cfg.prior.gamma_hi);
    }
  }
  if (root.contains("forecast")) {
    const auto& f = root.at("forecast");
    detail::require_keys(f, "forecast", {"rise_days", "fall_days", "horizons"});
    read_if(f, "rise_days", cfg.rise_days);
    read_if(f, "fall_days", cfg.fall_days);
    read_if(f, "horizons", cfg.horizons);
  }
  if (root.contains("evaluate")) {
    const auto& e = root.at("evaluate");
    detail::require_keys(e, "evaluate", {"origin_stride"});
    read_if(e, "origin_stride", cfg.origin_stride);
  }
  if (!root.contains("seed"))
    throw Error::config("config must set a seed (runs must be reproducible)");
  read_if(root, "seed", cfg.seed);
  read_if(root, "out_dir", cfg.out_dir);

  validate(cfg);
  return cfg;
}

inline void validate(const PipelineConfig& cfg) {
  if (cfg.display_window < 1 || cfg.detector_window < 1)
    throw Error::config("smoothing windows must be >= 1");
  if (cfg.sigma_window < 5) throw Error::config("sigma_window must be >= 5");
  if (!(cfg.risk > 0.0 && cfg.risk < 1.0)) throw Error::config("risk must lie in (0, 1)");
  if (cfg.calibration_trials < 100) throw Error::config("calibration_trials must be >= 100");
  if (cfg.ensemble_size < 2) throw Error::config("ensemble_size must be >= 2");
  if (cfg.rise_days < 0 || cfg.fall_days < 0)
    throw Error::config("rise_days and fall_days must be >= 0");
  if (cfg.horizons.empty()) throw Error::config("horizons list must not be empty");
  for (int h : cfg.horizons)
    if (h < 1) throw Error::config("horizons must be >= 1 days");
  if (cfg.origin_stride < 1) throw Error::config("origin_stride must be >= 1");
  if (cfg.population <= 0.0) throw Error::config("population must be > 0");
  if (cfg.series_csv.empty() &&
      (cfg.confirmed_csv.empty() || cfg.recovered_csv.empty() || cfg.deaths_csv.empty()))
    throw Error::config(
        "data must name either series_csv or all of confirmed/recovered/deaths_csv");
}

}  // namespace epiwave
