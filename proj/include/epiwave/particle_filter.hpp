#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>
#include <string>
#include <vector>

#include "epiwave/errors.hpp"
#include "epiwave/rng.hpp"
#include "epiwave/series.hpp"
#include "epiwave/sir.hpp"

namespace epiwave {

struct Particle {
  SirState state;
  SirParams params;
  double weight = 0.0;
};

struct Ensemble {
  std::vector<Particle> particles;
  int day = 0;
  double ess = 0.0;
  double population = 0.0;

  std::size_t size() const { return particles.size(); }
};

// Observation noise for the daily infected/removed counts. In relative mode
// the std is a fraction of the observed value with an absolute floor.
struct ObsModel {
  double infected_noise_std = 0.05;
  double removed_noise_std = 0.05;
  bool relative = true;
  double floor = 10.0;

  double infected_std(double obs) const {
    return relative ? std::max(floor, infected_noise_std * obs) : infected_noise_std;
  }
  double removed_std(double obs) const {
    return relative ? std::max(floor, removed_noise_std * obs) : removed_noise_std;
  }
};

// Uniform prior box for the initial ensemble.
struct PriorRanges {
  double i_lo = 0.0, i_hi = 0.0;
  double r_lo = 0.0, r_hi = 0.0;
  double beta_lo = 0.01, beta_hi = 1.0;
  double gamma_lo = 0.01, gamma_hi = 0.5;
};

inline double effective_sample_size(const std::vector<Particle>& particles) {
  double sum_sq = 0.0;
  for (const auto& p : particles) sum_sq += p.weight * p.weight;
  return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

// Particles drawn uniformly from the prior box; s takes the remainder so
// that s + i + r = N exactly (scaled down if i + r exceeds N).
inline Ensemble init_ensemble(const PriorRanges& prior, int m, double population, Rng& rng) {
  if (m < 2) throw Error::data("invalid-prior: ensemble needs at least 2 particles");
  auto check = [](double lo, double hi, const char* name) {
    if (lo > hi || lo < 0.0)
      throw Error::data(std::string("invalid-prior: bad range for ") + name);
  };
  check(prior.i_lo, prior.i_hi, "i");
  check(prior.r_lo, prior.r_hi, "r");
  check(prior.beta_lo, prior.beta_hi, "beta");
  check(prior.gamma_lo, prior.gamma_hi, "gamma");
  if (prior.i_hi + prior.r_hi > population)
    throw Error::data("invalid-prior: state ranges exceed population");

  Ensemble ens;
  ens.population = population;
  ens.particles.resize(m);
  for (auto& p : ens.particles) {
    p.state.i = rng.uniform(prior.i_lo, prior.i_hi);
    p.state.r = rng.uniform(prior.r_lo, prior.r_hi);
    p.state.s = population - p.state.i - p.state.r;
    p.params.beta = rng.uniform(prior.beta_lo, prior.beta_hi);
    p.params.gamma = rng.uniform(prior.gamma_lo, prior.gamma_hi);
    p.weight = 1.0 / m;
  }
  ens.ess = static_cast<double>(m);
  return ens;
}

// Advances every particle one day (parameter walk, then SIR step). Weights
// are untouched. Each particle gets its own substream derived from the day
// and its index, so a parallel implementation would be bit-identical.
inline Ensemble predict(const Ensemble& ens, const NoiseConfig& noise, Rng& rng) {
  Ensemble out = ens;
  out.day = ens.day + 1;
  std::uint64_t base = rng.next_u64();
  for (std::size_t m = 0; m < out.particles.size(); ++m) {
    Rng sub(seed_for(base, static_cast<std::uint64_t>(out.day), m));
    auto& p = out.particles[m];
    p.params = walk_params(p.params, noise, sub);
    p.state = step(p.state, p.params, out.population, noise, sub);
  }
  return out;
}

// Systematic resampling to uniform weights.
inline void systematic_resample(Ensemble& ens, Rng& rng) {
  const std::size_t m = ens.particles.size();
  std::vector<Particle> out(m);
  double u = rng.uniform() / static_cast<double>(m);
  double cum = ens.particles[0].weight;
  std::size_t j = 0;
  for (std::size_t k = 0; k < m; ++k) {
    double pos = u + static_cast<double>(k) / static_cast<double>(m);
    while (cum < pos && j + 1 < m) cum += ens.particles[++j].weight;
    out[k] = ens.particles[j];
    out[k].weight = 1.0 / static_cast<double>(m);
  }
  ens.particles = std::move(out);
  ens.ess = static_cast<double>(m);
}

struct Observation {
  double infected = 0.0;
  double removed = 0.0;
};

// Gaussian reweighting by the likelihood of the observed (infected, removed)
// pair, followed by normalization and (if the effective sample size dropped
// below half) systematic resampling. Throws when every particle's raw
// likelihood underflows to zero, which signals a model/data mismatch.
inline Ensemble update(const Ensemble& ens, const Observation& obs, const ObsModel& obs_model,
                       Rng& rng, double resample_frac = 0.5) {
  if (!(obs.infected >= 0.0) || !(obs.removed >= 0.0))
    throw Error::data("invalid-input: observations must be finite and non-negative");
  Ensemble out = ens;
  const double std_i = obs_model.infected_std(obs.infected);
  const double std_r = obs_model.removed_std(obs.removed);
  if (!(std_i > 0.0) || !(std_r > 0.0))
    throw Error::data("invalid-input: observation noise must be positive");

  std::vector<double> loglik(out.particles.size());
  double max_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < out.particles.size(); ++m) {
    double zi = (obs.infected - out.particles[m].state.i) / std_i;
    double zr = (obs.removed - out.particles[m].state.r) / std_r;
    loglik[m] = -0.5 * (zi * zi + zr * zr);
    max_ll = std::max(max_ll, loglik[m]);
  }
  // exp(-745) is the smallest positive double: below that every raw
  // likelihood is exactly zero and reweighting is meaningless.
  if (max_ll < -745.0)
    throw Error::numeric("degenerate-update: all observation likelihoods underflow to zero");

  double sum = 0.0;
  for (std::size_t m = 0; m < out.particles.size(); ++m) {
    out.particles[m].weight *= std::exp(loglik[m] - max_ll);
    sum += out.particles[m].weight;
  }
  if (!(sum > 0.0))
    throw Error::numeric("degenerate-update: posterior weights sum to zero");
  for (auto& p : out.particles) p.weight /= sum;
  out.ess = effective_sample_size(out.particles);
  if (out.ess < resample_frac * static_cast<double>(out.particles.size()))
    systematic_resample(out, rng);
  return out;
}

// Left-continuous inverse CDF of a weighted sample.
inline double weighted_quantile(std::vector<std::pair<double, double>>& value_weight, double q) {
  std::sort(value_weight.begin(), value_weight.end());
  double cum = 0.0;
  for (const auto& [v, w] : value_weight) {
    cum += w;
    if (cum >= q) return v;
  }
  return value_weight.back().first;
}

struct QuantileSummary {
  double mean = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

template <typename Getter>
inline QuantileSummary summarize(const Ensemble& ens, Getter get) {
  QuantileSummary s;
  std::vector<std::pair<double, double>> vw;
  vw.reserve(ens.particles.size());
  for (const auto& p : ens.particles) {
    s.mean += p.weight * get(p);
    vw.emplace_back(get(p), p.weight);
  }
  std::sort(vw.begin(), vw.end());
  double cum = 0.0;
  bool got05 = false, got50 = false;
  for (const auto& [v, w] : vw) {
    cum += w;
    if (!got05 && cum >= 0.05) { s.q05 = v; got05 = true; }
    if (!got50 && cum >= 0.50) { s.q50 = v; got50 = true; }
    if (cum >= 0.95) { s.q95 = v; return s; }
  }
  s.q95 = vw.back().first;
  return s;
}

struct PosteriorDay {
  Date date;
  QuantileSummary infected;
  QuantileSummary removed;
  QuantileSummary beta;
  QuantileSummary gamma;
  double ess = 0.0;
};

struct PosteriorSummary {
  std::vector<PosteriorDay> days;

  std::vector<double> beta_means() const {
    std::vector<double> out;
    out.reserve(days.size());
    for (const auto& d : days) out.push_back(d.beta.mean);
    return out;
  }
};

struct FilterResult {
  PosteriorSummary summary;
  std::vector<Ensemble> checkpoints;  // after each update, at checkpoint_stride
  std::vector<int> checkpoint_days;   // series index per checkpoint
};

inline PosteriorDay summarize_day(const Ensemble& ens, Date date) {
  PosteriorDay out;
  out.date = date;
  out.infected = summarize(ens, [](const Particle& p) { return p.state.i; });
  out.removed = summarize(ens, [](const Particle& p) { return p.state.r; });
  out.beta = summarize(ens, [](const Particle& p) { return p.params.beta; });
  out.gamma = summarize(ens, [](const Particle& p) { return p.params.gamma; });
  out.ess = ens.ess;
  return out;
}

// Runs the predict/update cycle over the whole series. Day 0 applies the
// update to the freshly initialized ensemble; every later day predicts then
// updates. Checkpoints (posterior ensembles) are retained every
// `checkpoint_stride` days for forecasting.
inline FilterResult run_filter(const EpidemicSeries& series, const PriorRanges& prior, int m,
                               const NoiseConfig& noise, const ObsModel& obs_model, Rng& rng,
                               int checkpoint_stride = 1, double resample_frac = 0.5) {
  if (series.size() < 2) throw Error::data("invalid-input: series needs at least 2 days");
  if (checkpoint_stride < 1) throw Error::config("checkpoint stride must be >= 1");

  FilterResult result;
  Ensemble ens = init_ensemble(prior, m, series.population, rng);
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (k > 0) ens = predict(ens, noise, rng);
    try {
      ens = update(ens, {series.infected[k], series.removed[k]}, obs_model, rng, resample_frac);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::numeric)
        throw Error::numeric(std::string(e.what()) + " (day index " + std::to_string(k) + ")");
      throw;
    }
    result.summary.days.push_back(summarize_day(ens, series.dates[k]));
    if (k % static_cast<std::size_t>(checkpoint_stride) == 0 || k + 1 == series.size()) {
      result.checkpoints.push_back(ens);
      result.checkpoint_days.push_back(static_cast<int>(k));
    }
  }
  return result;
}

enum class RegimeKind { controlled, critical };

// Average daily change of the posterior beta mean since the last declared
// regime change, clamped to zero when its sign disagrees with the regime.
inline double estimate_slope(const std::vector<double>& beta_means, int since_day, int at_day,
                             RegimeKind regime) {
  if (since_day >= at_day) throw Error::data("insufficient-history: need since_day < at_day");
  if (at_day >= static_cast<int>(beta_means.size()) || since_day < 0)
    throw Error::data("invalid-input: slope window outside available history");
  double sum = 0.0;
  for (int d = since_day + 1; d <= at_day; ++d) sum += beta_means[d] - beta_means[d - 1];
  double slope = sum / static_cast<double>(at_day - since_day);
  if (regime == RegimeKind::critical && slope < 0.0) return 0.0;
  if (regime == RegimeKind::controlled && slope > 0.0) return 0.0;
  return slope;
}

inline std::string posterior_to_csv(const PosteriorSummary& summary) {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  std::string out =
      "date,i_mean,i_q05,i_q50,i_q95,r_mean,r_q05,r_q50,r_q95,"
      "beta_mean,beta_q05,beta_q50,beta_q95,gamma_mean,gamma_q05,gamma_q50,gamma_q95,ess\n";
  for (const auto& d : summary.days) {
    out += d.date.iso();
    for (const auto* q : {&d.infected, &d.removed, &d.beta, &d.gamma}) {
      out += ',' + fmt(q->mean) + ',' + fmt(q->q05) + ',' + fmt(q->q50) + ',' + fmt(q->q95);
    }
    out += ',' + fmt(d.ess);
    out += '\n';
  }
  return out;
}

}  // namespace epiwave
