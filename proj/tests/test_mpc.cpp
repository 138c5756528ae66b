#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hzn/forecast.hpp"
#include "hzn/mpc.hpp"

using hzn::BatterySpec;
using hzn::ErrorModel;
using hzn::ForecastSet;
using hzn::MarketParams;
using hzn::MpcConfig;
using hzn::MpcRun;
using hzn::Schedule;
using hzn::Series;

namespace {

Series sine_truth(int n) {
  Series s(1.0, std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    s.values[static_cast<std::size_t>(i)] =
        10.0 * std::sin(2.0 * 3.14159265358979323846 * i / 24.0);
  }
  return s;
}

BatterySpec one_hour_battery() {
  BatterySpec b;
  b.capacity_mwh = 10.0;
  b.charge_power_mw = 10.0;
  b.discharge_power_mw = 10.0;
  b.efficiency = 0.95;
  b.soc_initial_mwh = 2.0;
  return b;
}

ForecastSet perfect_forecasts(const Series& truth, int interval, int horizon,
                              std::uint64_t seed = 1) {
  ErrorModel m;
  m.uncertainty_factor = 0.0;
  return hzn::issue_forecasts(truth, m, interval, horizon, seed);
}

}  // namespace

TEST_CASE("one full-length window reproduces the clairvoyant optimum") {
  const Series truth = sine_truth(24);
  const BatterySpec b = one_hour_battery();
  const ForecastSet fc = perfect_forecasts(truth, 3, 24);
  const MpcRun run = hzn::run_mpc(truth, fc, b, MarketParams{}, {24, 3});

  const auto [buy, sell] = hzn::split_prices(truth, MarketParams{});
  const Schedule full = hzn::solve_window(buy, sell, b, MarketParams{}, 2.0);
  CHECK(run.realized_revenue_eur ==
        doctest::Approx(full.objective_eur).epsilon(1e-9));
  CHECK(run.committed.steps.size() == truth.size());
}

TEST_CASE("blocks tile the study window and carry the state of charge") {
  const Series truth = sine_truth(32);
  const BatterySpec b = one_hour_battery();
  const ForecastSet fc = perfect_forecasts(truth, 3, 40);
  const MpcRun run = hzn::run_mpc(truth, fc, b, MarketParams{}, {12, 5});

  CHECK(run.committed.steps.size() == 32);
  // 5+5+5+5+5+5+2: the final block shrinks to what remains
  CHECK(run.window_objectives.size() == 7);
  CHECK(run.block_realized_eur.size() == 7);

  double soc = b.soc_initial_mwh;
  for (const auto& st : run.committed.steps) {
    soc += (b.efficiency * st.charge_mw - st.discharge_mw) *
           run.committed.step_hours;
    CHECK(st.soc_mwh == doctest::Approx(soc).epsilon(1e-12));
    CHECK(soc >= -1e-9);
    CHECK(soc <= b.capacity_mwh + 1e-9);
  }

  double total = 0.0;
  for (double v : run.block_realized_eur) total += v;
  CHECK(run.realized_revenue_eur == doctest::Approx(total));
}

TEST_CASE("horizons shorter than the stride replan when the plan runs out") {
  const Series truth = sine_truth(30);
  const BatterySpec b = one_hour_battery();
  const ForecastSet fc = perfect_forecasts(truth, 3, 30);

  // A one-step horizon exhausts its plan immediately, so the controller ends
  // up replanning at every step instead of leaving steps uncontrolled.
  const MpcRun h1 = hzn::run_mpc(truth, fc, b, MarketParams{}, {1, 3});
  REQUIRE(h1.committed.steps.size() == 30);
  CHECK(h1.window_objectives.size() == 30);
  CHECK(h1.block_realized_eur.size() == 30);

  const MpcRun h2 = hzn::run_mpc(truth, fc, b, MarketParams{}, {2, 3});
  CHECK(h2.committed.steps.size() == 30);
  CHECK(h2.window_objectives.size() == 15);

  // With every step controlled, extra look-ahead cannot hurt under perfect
  // information even below the stride.
  const MpcRun h3 = hzn::run_mpc(truth, fc, b, MarketParams{}, {3, 3});
  CHECK(h1.realized_revenue_eur <= h2.realized_revenue_eur + 1e-6);
  CHECK(h2.realized_revenue_eur <= h3.realized_revenue_eur + 1e-6);
}

TEST_CASE("realized revenue prices committed flows at the truth") {
  const Series truth(1.0, {10.0, 50.0});
  Schedule sched;
  sched.step_hours = 1.0;
  sched.soc_start_mwh = 0.0;
  sched.steps.resize(2);
  sched.steps[0].charge_mw = 1.0;
  sched.steps[0].grid_in_mw = 1.0;
  sched.steps[0].soc_mwh = 1.0;
  sched.steps[1].discharge_mw = 1.0;
  sched.steps[1].grid_out_mw = 1.0;
  sched.steps[1].soc_mwh = 0.0;
  CHECK(hzn::realized_revenue(sched, truth, MarketParams{}) ==
        doctest::Approx(37.92));

  Schedule idle;
  idle.step_hours = 1.0;
  idle.steps.resize(2);
  CHECK(hzn::realized_revenue(idle, truth, MarketParams{}) == 0.0);

  Schedule too_long;
  too_long.steps.resize(3);
  CHECK_THROWS(hzn::realized_revenue(too_long, truth, MarketParams{}));
}

TEST_CASE("identical inputs give identical runs") {
  const Series truth = sine_truth(48);
  const BatterySpec b = one_hour_battery();
  ErrorModel m;
  m.uncertainty_factor = 3.0;
  const ForecastSet fc = hzn::issue_forecasts(truth, m, 3, 24, 17);
  const MpcRun a = hzn::run_mpc(truth, fc, b, MarketParams{}, {12, 3});
  const MpcRun c = hzn::run_mpc(truth, fc, b, MarketParams{}, {12, 3});
  CHECK(a.realized_revenue_eur == c.realized_revenue_eur);
  REQUIRE(a.committed.steps.size() == c.committed.steps.size());
  for (std::size_t i = 0; i < a.committed.steps.size(); ++i) {
    CHECK(a.committed.steps[i].charge_mw == c.committed.steps[i].charge_mw);
    CHECK(a.committed.steps[i].discharge_mw ==
          c.committed.steps[i].discharge_mw);
  }
}

TEST_CASE("perfect information never loses from longer look-ahead") {
  const Series truth = sine_truth(72);
  const BatterySpec b = one_hour_battery();
  const ForecastSet fc = perfect_forecasts(truth, 3, 72);
  double prev = -1e18;
  for (int h : {3, 6, 12, 24, 36}) {
    const MpcRun run = hzn::run_mpc(truth, fc, b, MarketParams{}, {h, 3});
    CHECK(run.realized_revenue_eur >= prev - 1e-6);
    prev = run.realized_revenue_eur;
  }
}

TEST_CASE("insufficient forecast coverage is reported") {
  const Series truth = sine_truth(40);
  const ForecastSet fc = perfect_forecasts(truth, 3, 10);
  // at issue step 0 the window needs 12 leads but the forecast has 10
  CHECK_THROWS(hzn::run_mpc(truth, fc, one_hour_battery(), MarketParams{},
                            {12, 3}));
}
