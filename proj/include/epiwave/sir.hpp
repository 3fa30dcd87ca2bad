#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "epiwave/errors.hpp"
#include "epiwave/rng.hpp"

namespace epiwave {

struct SirState {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;
};

struct SirParams {
  double beta = 0.0;   // infections per susceptible-infected contact day
  double gamma = 0.0;  // recoveries per infected day
};

// Process noise magnitudes; zero everywhere means deterministic dynamics.
// Noise enters the two daily flows (new infections, new removals), never the
// compartments directly, so the population total is conserved by
// construction.
struct NoiseConfig {
  double state_noise_std = 0.0;  // persons, added to each flow
  double beta_walk_std = 0.0;    // per-day random walk on beta
  double gamma_walk_std = 0.0;   // per-day random walk on gamma
};

// One day of the discrete SIR map. Flows are clamped so every compartment
// stays in [0, N] and s + i + r = N exactly.
inline SirState step(const SirState& state, const SirParams& params, double population,
                     const NoiseConfig& noise, Rng& rng) {
  if (population <= 0.0) throw Error::data("invalid-population: N must be positive");
  double flow_infect = params.beta * state.s * state.i / population;
  double flow_remove = params.gamma * state.i;
  if (noise.state_noise_std > 0.0) {
    flow_infect += rng.normal(0.0, noise.state_noise_std);
    flow_remove += rng.normal(0.0, noise.state_noise_std);
  }
  flow_infect = std::clamp(flow_infect, 0.0, state.s);
  flow_remove = std::clamp(flow_remove, 0.0, state.i + flow_infect);
  return {state.s - flow_infect, state.i + flow_infect - flow_remove, state.r + flow_remove};
}

// Gaussian random walk on the rates, reflected at zero.
inline SirParams walk_params(const SirParams& params, const NoiseConfig& noise, Rng& rng) {
  SirParams out = params;
  if (noise.beta_walk_std > 0.0) out.beta = std::fabs(out.beta + rng.normal(0.0, noise.beta_walk_std));
  if (noise.gamma_walk_std > 0.0)
    out.gamma = std::fabs(out.gamma + rng.normal(0.0, noise.gamma_walk_std));
  return out;
}

struct Trajectory {
  std::vector<SirState> states;  // index 0 is the initial state
  std::vector<SirParams> params; // params[k] produced states[k] (params[0] = initial)
};

// Runs the map for `days` steps. When `param_traj` is non-empty it must hold
// one entry per step and overrides the random walk.
inline Trajectory simulate(const SirState& init, const SirParams& init_params,
                           const std::vector<SirParams>& param_traj, int days, double population,
                           const NoiseConfig& noise, Rng& rng) {
  if (days < 1) throw Error::data("invalid-horizon: days must be >= 1");
  if (!param_traj.empty() && static_cast<int>(param_traj.size()) < days)
    throw Error::data("invalid-input: parameter trajectory shorter than horizon");
  Trajectory traj;
  traj.states.reserve(days + 1);
  traj.params.reserve(days + 1);
  traj.states.push_back(init);
  traj.params.push_back(init_params);
  SirState state = init;
  SirParams params = init_params;
  for (int d = 0; d < days; ++d) {
    params = param_traj.empty() ? walk_params(params, noise, rng) : param_traj[d];
    state = step(state, params, population, noise, rng);
    traj.states.push_back(state);
    traj.params.push_back(params);
  }
  return traj;
}

inline Trajectory simulate(const SirState& init, const SirParams& init_params, int days,
                           double population, const NoiseConfig& noise, Rng& rng) {
  return simulate(init, init_params, {}, days, population, noise, rng);
}

inline std::string trajectory_to_csv(const Trajectory& traj) {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  std::string out = "day,s,i,r,beta,gamma\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out += std::to_string(k);
    out += ',' + fmt(traj.states[k].s) + ',' + fmt(traj.states[k].i) + ',' + fmt(traj.states[k].r);
    out += ',' + fmt(traj.params[k].beta) + ',' + fmt(traj.params[k].gamma);
    out += '\n';
  }
  return out;
}

}  // namespace epiwave
