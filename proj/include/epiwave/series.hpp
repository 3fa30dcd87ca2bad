#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "epiwave/dates.hpp"
#include "epiwave/errors.hpp"

namespace epiwave {

// One repair applied while cleaning a raw report stream.
struct RepairEntry {
  Date date;
  std::string field;   // confirmed | recovered | deaths
  std::string action;  // gap-fill | monotone-repair
  double before = 0.0;
  double after = 0.0;
};

using RepairLog = std::vector<RepairEntry>;

// Cumulative report triple on a contiguous daily grid.
struct RawSeries {
  std::vector<Date> dates;
  std::vector<double> confirmed_cum;
  std::vector<double> recovered_cum;
  std::vector<double> deaths_cum;

  std::size_t size() const { return dates.size(); }
};

// Per-day epidemic state derived from cumulative reports.
struct EpidemicSeries {
  std::vector<Date> dates;
  std::vector<double> infected;       // active I
  std::vector<double> removed;        // cumulative R (recoveries + deaths)
  std::vector<double> new_positives;  // daily increment of confirmed
  double population = 0.0;

  std::size_t size() const { return dates.size(); }
};

// Forces a cumulative series non-decreasing: any decrease is replaced by the
// previous value. Idempotent.
inline void monotone_repair(std::vector<Date>& dates, std::vector<double>& values,
                            const std::string& field, RepairLog& log) {
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] < values[k - 1]) {
      log.push_back({dates[k], field, "monotone-repair", values[k], values[k - 1]});
      values[k] = values[k - 1];
    }
  }
}

// Fills calendar gaps by carrying the last cumulative value forward.
inline RawSeries fill_gaps(const RawSeries& raw, RepairLog& log) {
  if (raw.dates.empty()) return raw;
  RawSeries out;
  out.dates.push_back(raw.dates.front());
  out.confirmed_cum.push_back(raw.confirmed_cum.front());
  out.recovered_cum.push_back(raw.recovered_cum.front());
  out.deaths_cum.push_back(raw.deaths_cum.front());
  for (std::size_t k = 1; k < raw.size(); ++k) {
    if (raw.dates[k].serial <= out.dates.back().serial)
      throw Error::data("parse error: dates not strictly increasing at " + raw.dates[k].iso());
    for (Date d = out.dates.back() + 1; d < raw.dates[k]; d = d + 1) {
      log.push_back({d, "all", "gap-fill", std::nan(""), out.confirmed_cum.back()});
      out.dates.push_back(d);
      out.confirmed_cum.push_back(out.confirmed_cum.back());
      out.recovered_cum.push_back(out.recovered_cum.back());
      out.deaths_cum.push_back(out.deaths_cum.back());
    }
    out.dates.push_back(raw.dates[k]);
    out.confirmed_cum.push_back(raw.confirmed_cum[k]);
    out.recovered_cum.push_back(raw.recovered_cum[k]);
    out.deaths_cum.push_back(raw.deaths_cum[k]);
  }
  return out;
}

// Gap-fill then monotone repair on each cumulative column.
inline RawSeries clean_raw_series(const RawSeries& raw, RepairLog& log) {
  if (raw.size() == 0) throw Error::data("empty-input: no rows after parsing");
  RawSeries out = fill_gaps(raw, log);
  monotone_repair(out.dates, out.confirmed_cum, "confirmed", log);
  monotone_repair(out.dates, out.recovered_cum, "recovered", log);
  monotone_repair(out.dates, out.deaths_cum, "deaths", log);
  return out;
}

// infected = confirmed - recovered - deaths (clamped at 0),
// removed = recovered + deaths, new_positives = daily confirmed increment.
// The first new_positives entry is the full first confirmed count.
inline EpidemicSeries build_epidemic_series(const RawSeries& raw, double population) {
  if (raw.size() == 0) throw Error::data("empty-input: raw series is empty");
  double max_confirmed = *std::max_element(raw.confirmed_cum.begin(), raw.confirmed_cum.end());
  if (population <= max_confirmed)
    throw Error::data("invalid-population: population " + std::to_string(population) +
                      " does not exceed max confirmed " + std::to_string(max_confirmed));
  EpidemicSeries out;
  out.dates = raw.dates;
  out.population = population;
  out.infected.resize(raw.size());
  out.removed.resize(raw.size());
  out.new_positives.resize(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out.removed[k] = raw.recovered_cum[k] + raw.deaths_cum[k];
    out.infected[k] = std::max(0.0, raw.confirmed_cum[k] - out.removed[k]);
    double prev = k == 0 ? 0.0 : raw.confirmed_cum[k - 1];
    out.new_positives[k] = std::max(0.0, raw.confirmed_cum[k] - prev);
  }
  return out;
}

enum class SmoothMode { centered, trailing };

// Moving average with shrunken windows at the edges: every output is the
// mean of the available samples inside the nominal window.
inline std::vector<double> smooth(const std::vector<double>& series, int window, SmoothMode mode) {
  if (window < 1) throw Error::data("invalid-window: window must be >= 1");
  if (mode == SmoothMode::centered && window % 2 == 0)
    throw Error::data("invalid-window: centered window must be odd");
  if (series.empty()) throw Error::data("empty-input: nothing to smooth");
  const int n = static_cast<int>(series.size());
  std::vector<double> out(series.size());
  for (int k = 0; k < n; ++k) {
    int lo, hi;  // inclusive
    if (mode == SmoothMode::centered) {
      lo = k - window / 2;
      hi = k + window / 2;
    } else {
      lo = k - window + 1;
      hi = k;
    }
    lo = std::max(lo, 0);
    hi = std::min(hi, n - 1);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) sum += series[j];
    out[k] = sum / (hi - lo + 1);
  }
  return out;
}

inline EpidemicSeries smooth(const EpidemicSeries& series, int window, SmoothMode mode) {
  EpidemicSeries out = series;
  out.infected = smooth(series.infected, window, mode);
  out.removed = smooth(series.removed, window, mode);
  out.new_positives = smooth(series.new_positives, window, mode);
  return out;
}

}  // namespace epiwave
