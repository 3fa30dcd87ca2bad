#include "epiwave/forecast.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "epiwave/rng.hpp"

using namespace epiwave;

namespace {

Ensemble uniform_checkpoint(int m, double n, SirState state, SirParams params, int day = 0) {
  Ensemble ens;
  ens.population = n;
  ens.day = day;
  ens.particles.resize(m);
  for (auto& p : ens.particles) {
    p.state = state;
    p.params = params;
    p.weight = 1.0 / m;
  }
  ens.ess = static_cast<double>(m);
  return ens;
}

}  // namespace

TEST(Scenario, ContinuationHandCase) {
  ScenarioSpec spec{ScenarioKind::A, 15, 30, 0.002, 0.10, 0.05};
  BetaTrajectory traj = build_scenario(spec, 30);
  ASSERT_EQ(traj.beta.size(), 30u);
  EXPECT_NEAR(traj.beta[4], 0.11, 1e-12);
  EXPECT_NEAR(traj.beta[14], 0.13, 1e-12);
  for (int d = 15; d <= 30; ++d) EXPECT_NEAR(traj.beta[d - 1], 0.13, 1e-12);
  EXPECT_DOUBLE_EQ(traj.beta0, 0.10);
}

TEST(Scenario, MitigatedHandCase) {
  ScenarioSpec spec{ScenarioKind::B, 15, 30, 0.002, 0.10, 0.05};
  BetaTrajectory traj = build_scenario(spec, 60);
  EXPECT_NEAR(traj.beta[14], 0.13, 1e-12);
  EXPECT_NEAR(traj.beta[29], 0.13 - 0.002 * 15, 1e-12);
  EXPECT_NEAR(traj.beta[44], 0.07, 1e-12);
  for (int d = 46; d <= 60; ++d) EXPECT_NEAR(traj.beta[d - 1], 0.07, 1e-12);
}

TEST(Scenario, MitigationNeedsPositiveSlope) {
  for (double slope : {0.0, -0.003}) {
    ScenarioSpec a{ScenarioKind::A, 15, 30, slope, 0.2, 0.05};
    ScenarioSpec b{ScenarioKind::B, 15, 30, slope, 0.2, 0.05};
    EXPECT_EQ(build_scenario(a, 40).beta, build_scenario(b, 40).beta);
  }
}

TEST(Scenario, MitigatedNeverExceedsContinuation) {
  ScenarioSpec a{ScenarioKind::A, 10, 20, 0.004, 0.15, 0.05};
  ScenarioSpec b{ScenarioKind::B, 10, 20, 0.004, 0.15, 0.05};
  BetaTrajectory ta = build_scenario(a, 50);
  BetaTrajectory tb = build_scenario(b, 50);
  for (int d = 0; d < 50; ++d) EXPECT_LE(tb.beta[d], ta.beta[d]);
}

TEST(Scenario, ClampsAtZero) {
  ScenarioSpec spec{ScenarioKind::A, 15, 30, -0.02, 0.05, 0.05};
  BetaTrajectory traj = build_scenario(spec, 20);
  for (double b : traj.beta) EXPECT_GE(b, 0.0);
  EXPECT_EQ(traj.beta[14], 0.0);
}

TEST(Scenario, Validation) {
  ScenarioSpec spec{ScenarioKind::A, 15, 30, 0.002, 0.10, 0.05};
  EXPECT_THROW(build_scenario(spec, 0), Error);
  ScenarioSpec bad_rise = spec;
  bad_rise.rise_days = -1;
  EXPECT_THROW(build_scenario(bad_rise, 10), Error);
  ScenarioSpec bad_beta = spec;
  bad_beta.beta0 = -0.1;
  EXPECT_THROW(build_scenario(bad_beta, 10), Error);
  try {
    build_scenario(spec, -5);
    FAIL() << "expected invalid-horizon";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_NE(std::string(e.what()).find("invalid-horizon"), std::string::npos);
  }
}

TEST(EnsembleForecast, ZeroNoiseMatchesDeterministicRun) {
  // a single particle makes the ensemble statistics exact copies of the path
  const double n = 1e6;
  SirState init{n - 1500, 1000, 500};
  SirParams params{0.25, 0.1};
  Ensemble cp = uniform_checkpoint(1, n, init, params, 40);

  ScenarioSpec spec{ScenarioKind::A, 15, 30, 0.002, 0.25, 0.1};
  BetaTrajectory traj = build_scenario(spec, 20);
  NoiseConfig quiet;
  Rng rng(941);
  ForecastResult fc = ensemble_forecast(cp, traj, quiet, 20, rng, Date(2020, 4, 10));

  std::vector<SirParams> path;
  for (double b : traj.beta) path.push_back({b, 0.1});
  Rng sim_rng(1);
  Trajectory ref = simulate(init, params, path, 20, n, quiet, sim_rng);

  ASSERT_EQ(fc.days.size(), 20u);
  EXPECT_EQ(fc.ensemble_size, 1);
  EXPECT_EQ(fc.forecast_day, 40);
  for (int d = 1; d <= 20; ++d) {
    const ForecastDay& day = fc.days[d - 1];
    EXPECT_DOUBLE_EQ(day.i_mean, ref.states[d].i) << "day " << d;
    EXPECT_DOUBLE_EQ(day.i_q05, ref.states[d].i);
    EXPECT_DOUBLE_EQ(day.i_q95, ref.states[d].i);
    EXPECT_DOUBLE_EQ(day.i_std, 0.0);
    EXPECT_DOUBLE_EQ(day.r_mean, ref.states[d].r);
    EXPECT_EQ(day.date, Date(2020, 4, 10) + d);
  }
}

TEST(EnsembleForecast, BetaOffsetsCarryPosteriorSpread) {
  const double n = 1e6;
  Ensemble cp = uniform_checkpoint(2, n, {n - 2000, 1500, 500}, {0.2, 0.1});
  cp.particles[1].params.beta = 0.4;

  BetaTrajectory traj;
  traj.beta = {0.3};
  traj.beta0 = 0.3;
  NoiseConfig quiet;
  Rng rng(942);
  ForecastResult fc = ensemble_forecast(cp, traj, quiet, 1, rng, Date(2020, 4, 10));

  // offsets 2/3 and 4/3 reproduce each particle's own beta exactly
  Rng s1(1), s2(1);
  SirState lo = step({n - 2000, 1500, 500}, {0.3 * (0.2 / 0.3), 0.1}, n, quiet, s1);
  SirState hi = step({n - 2000, 1500, 500}, {0.3 * (0.4 / 0.3), 0.1}, n, quiet, s2);
  EXPECT_DOUBLE_EQ(fc.days[0].i_q05, std::min(lo.i, hi.i));
  EXPECT_DOUBLE_EQ(fc.days[0].i_q95, std::max(lo.i, hi.i));
  EXPECT_DOUBLE_EQ(fc.days[0].i_mean, (lo.i + hi.i) / 2.0);
}

TEST(EnsembleForecast, ZeroAnchorDisablesOffsets) {
  const double n = 1e6;
  Ensemble cp = uniform_checkpoint(2, n, {n - 2000, 1500, 500}, {0.2, 0.1});
  cp.particles[1].params.beta = 0.4;
  BetaTrajectory traj;
  traj.beta = {0.3};
  traj.beta0 = 0.0;
  NoiseConfig quiet;
  Rng rng(943);
  ForecastResult fc = ensemble_forecast(cp, traj, quiet, 1, rng, Date(2020, 4, 10));
  EXPECT_DOUBLE_EQ(fc.days[0].i_std, 0.0);
}

TEST(EnsembleForecast, PrefixOfLongerHorizonIsIdentical) {
  const double n = 1e6;
  Ensemble cp = uniform_checkpoint(50, n, {n - 3000, 2000, 1000}, {0.22, 0.1});
  ScenarioSpec spec{ScenarioKind::B, 15, 30, 0.003, 0.22, 0.1};
  NoiseConfig noise{20.0, 0.0, 0.0};

  Rng r_long(944), r_short(944);
  ForecastResult full = ensemble_forecast(cp, build_scenario(spec, 28), noise, 28, r_long,
                                          Date(2020, 4, 10));
  ForecastResult head = ensemble_forecast(cp, build_scenario(spec, 9), noise, 9, r_short,
                                          Date(2020, 4, 10));
  for (int d = 0; d < 9; ++d) {
    EXPECT_EQ(full.days[d].i_mean, head.days[d].i_mean) << "day " << d;
    EXPECT_EQ(full.days[d].i_q95, head.days[d].i_q95);
    EXPECT_EQ(full.days[d].r_mean, head.days[d].r_mean);
  }
}

TEST(EnsembleForecast, DeterministicGivenSeed) {
  const double n = 1e6;
  Ensemble cp = uniform_checkpoint(100, n, {n - 3000, 2000, 1000}, {0.22, 0.1});
  ScenarioSpec spec{ScenarioKind::A, 15, 30, 0.002, 0.22, 0.1};
  BetaTrajectory traj = build_scenario(spec, 14);
  NoiseConfig noise{20.0, 0.0, 0.0};
  Rng a(945), b(945), c(946);
  std::string fa = forecast_to_csv(ensemble_forecast(cp, traj, noise, 14, a, Date(2020, 4, 10)));
  std::string fb = forecast_to_csv(ensemble_forecast(cp, traj, noise, 14, b, Date(2020, 4, 10)));
  std::string fc = forecast_to_csv(ensemble_forecast(cp, traj, noise, 14, c, Date(2020, 4, 10)));
  EXPECT_EQ(fa, fb);
  EXPECT_NE(fa, fc);
}

TEST(EnsembleForecast, BandsAreOrdered) {
  const double n = 1e6;
  Rng init_rng(947);
  Ensemble cp = uniform_checkpoint(200, n, {n - 3000, 2000, 1000}, {0.22, 0.1});
  for (auto& p : cp.particles) p.params.beta = init_rng.uniform(0.15, 0.3);
  ScenarioSpec spec{ScenarioKind::A, 15, 30, 0.002, 0.22, 0.1};
  BetaTrajectory traj = build_scenario(spec, 21);
  NoiseConfig noise{50.0, 0.0, 0.0};
  Rng rng(948);
  ForecastResult fc = ensemble_forecast(cp, traj, noise, 21, rng, Date(2020, 4, 10));
  for (const auto& day : fc.days) {
    EXPECT_LE(day.i_q05, day.i_q95);
    EXPECT_LE(day.r_q05, day.r_q95);
    EXPECT_GE(day.i_std, 0.0);
    EXPECT_GE(day.i_q05, 0.0);
  }
}

TEST(EnsembleForecast, Validation) {
  Ensemble cp = uniform_checkpoint(10, 1e6, {1e6 - 200, 150, 50}, {0.2, 0.1});
  BetaTrajectory traj;
  traj.beta = {0.2, 0.2};
  traj.beta0 = 0.2;
  NoiseConfig quiet;
  Rng rng(1);
  EXPECT_THROW(ensemble_forecast(cp, traj, quiet, 0, rng, Date(2020, 4, 10)), Error);
  EXPECT_THROW(ensemble_forecast(cp, traj, quiet, 3, rng, Date(2020, 4, 10)), Error);
  Ensemble empty;
  empty.population = 1e6;
  EXPECT_THROW(ensemble_forecast(empty, traj, quiet, 2, rng, Date(2020, 4, 10)), Error);
}

TEST(Mape, HandCases) {
  MapeResult exact = mape({100, 100}, {100, 100});
  EXPECT_DOUBLE_EQ(exact.value, 0.0);
  EXPECT_TRUE(exact.skipped.empty());
  MapeResult ten = mape({110, 90}, {100, 100});
  EXPECT_DOUBLE_EQ(ten.value, 10.0);
}

TEST(Mape, SkipsZeroActualDays) {
  MapeResult got = mape({110, 50, 90}, {100, 0, 100});
  EXPECT_DOUBLE_EQ(got.value, 10.0);
  std::vector<int> want{2};
  EXPECT_EQ(got.skipped, want);
}

TEST(Mape, Validation) {
  EXPECT_THROW(mape({1, 2}, {1}), Error);
  EXPECT_THROW(mape({}, {}), Error);
  try {
    mape({5, 5}, {0, 0});
    FAIL() << "expected undefined-mape";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numeric);
    EXPECT_NE(std::string(e.what()).find("undefined-mape"), std::string::npos);
  }
}

TEST(ForecastCsv, Shape) {
  Ensemble cp = uniform_checkpoint(10, 1e6, {1e6 - 200, 150, 50}, {0.2, 0.1});
  BetaTrajectory traj;
  traj.beta = {0.2, 0.2, 0.2};
  traj.beta0 = 0.2;
  Rng rng(949);
  ForecastResult fc = ensemble_forecast(cp, traj, NoiseConfig{}, 3, rng, Date(2020, 4, 10));
  std::string csv = forecast_to_csv(fc);
  EXPECT_EQ(csv.rfind("date,i_mean,i_std,i_q05,i_q95,r_mean,r_std,r_q05,r_q95\n", 0), 0u);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("2020-04-11,", 0), 0u);
}
