#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hzn/analysis.hpp"
#include "hzn/rng.hpp"

using hzn::HorizonCurve;
using hzn::SweepResult;

namespace {

HorizonCurve curve(std::vector<double> revenues) {
  HorizonCurve c;
  for (std::size_t i = 0; i < revenues.size(); ++i) {
    c.horizons_h.push_back(static_cast<double>(i + 1));
  }
  c.revenues_eur = std::move(revenues);
  return c;
}

}  // namespace

TEST_CASE("effective horizon finds the plateau entry") {
  const HorizonCurve c = curve({5, 9, 10, 10, 10});
  CHECK(hzn::effective_horizon(c, 0.0) == 3.0);
  CHECK(hzn::effective_horizon(c, 0.15) == 2.0);  // 9 >= 0.85 * 10
  CHECK(hzn::effective_horizon(curve({7, 7, 7}), 0.0) == 1.0);
}

TEST_CASE("effective horizon of non-positive curves uses absolute slack") {
  const HorizonCurve c = curve({-10.0, -2.0, -1.0, -1.5});
  CHECK(hzn::effective_horizon(c, 0.0) == 3.0);
  // threshold -1 - 0.5 * 1 = -1.5 admits horizon 4's value as well, but 2
  // (-2 < -1.5) still fails
  CHECK(hzn::effective_horizon(c, 0.5) == 3.0);
  CHECK(hzn::effective_horizon(curve({0.0, 0.0}), 0.1) == 1.0);
}

TEST_CASE("optimal horizon takes the first argmax") {
  CHECK(hzn::optimal_horizon(curve({5, 9, 10, 8, 7})) == 3.0);
  CHECK(hzn::optimal_horizon(curve({10, 10, 7})) == 1.0);
  CHECK(hzn::optimal_horizon(curve({1, 2, 3, 4})) == 4.0);
}

TEST_CASE("uncertainty gap is a signed difference") {
  CHECK(hzn::uncertainty_gap(10.0, 7.0) == 3.0);
  CHECK(hzn::uncertainty_gap(7.0, 7.0) == 0.0);
  CHECK(hzn::uncertainty_gap(3.0, 8.0) == -5.0);
}

TEST_CASE("loss beyond the optimum") {
  CHECK(*hzn::loss_beyond_optimum(curve({5, 10, 9, 7, 8})) ==
        doctest::Approx(30.0));
  CHECK(*hzn::loss_beyond_optimum(curve({5, 10, 10, 10})) == doctest::Approx(0.0));
  CHECK(!hzn::loss_beyond_optimum(curve({-5, -1, -3})).has_value());
  CHECK(!hzn::loss_beyond_optimum(curve({0.0, 0.0})).has_value());
}

TEST_CASE("loss is invariant to positive rescaling") {
  const HorizonCurve a = curve({4, 10, 6, 9});
  HorizonCurve b = a;
  for (double& v : b.revenues_eur) v *= 17.5;
  CHECK(*hzn::loss_beyond_optimum(a) ==
        doctest::Approx(*hzn::loss_beyond_optimum(b)));
}

TEST_CASE("argmax never comes after the plateau entry at zero epsilon") {
  hzn::Rng rng(4242);
  for (int round = 0; round < 200; ++round) {
    std::vector<double> r;
    const int n = 2 + static_cast<int>(rng.next_u64() % 10);
    for (int i = 0; i < n; ++i) r.push_back(rng.uniform01() * 20.0 - 5.0);
    const HorizonCurve c = curve(std::move(r));
    CHECK(hzn::optimal_horizon(c) <= hzn::effective_horizon(c, 0.0));
    // and with epsilon the entry can only move earlier
    CHECK(hzn::effective_horizon(c, 0.2) <= hzn::effective_horizon(c, 0.0));
  }
}

TEST_CASE("analyze_curve wires the reference curve into h_eff") {
  const HorizonCurve forecast = curve({8, 12, 11, 9});
  const HorizonCurve reference = curve({9, 11, 13, 13});
  const SweepResult r = hzn::analyze_curve(forecast, reference, 0.0);
  CHECK(r.h_opt == 2.0);
  CHECK(r.h_eff == 3.0);
  CHECK(r.gap_h == 1.0);
  CHECK(!r.gap_negative);
  CHECK(*r.loss_pct == doctest::Approx(100.0 * 3.0 / 12.0));

  const SweepResult neg = hzn::analyze_curve(reference, forecast, 0.0);
  CHECK(neg.h_opt == 3.0);
  CHECK(neg.h_eff == 2.0);
  CHECK(neg.gap_h == -1.0);
  CHECK(neg.gap_negative);
}

TEST_CASE("degenerate and malformed curves") {
  const HorizonCurve single = curve({42.0});
  CHECK(hzn::optimal_horizon(single) == 1.0);
  CHECK(hzn::effective_horizon(single, 0.0) == 1.0);

  HorizonCurve empty;
  CHECK_THROWS(hzn::optimal_horizon(empty));
  HorizonCurve ragged = curve({1.0, 2.0});
  ragged.revenues_eur.pop_back();
  CHECK_THROWS(hzn::optimal_horizon(ragged));
  HorizonCurve unsorted = curve({1.0, 2.0});
  unsorted.horizons_h = {2.0, 1.0};
  CHECK_THROWS(hzn::optimal_horizon(unsorted));
  CHECK_THROWS(hzn::effective_horizon(single, -0.1));
}

TEST_CASE("sweep runs one controller pass per horizon on a shared draw") {
  // smoke scale: short study, tiny battery, three horizons
  hzn::SweepSetup setup;
  setup.truth_spot.step_hours = 1.0;
  for (int i = 0; i < 48; ++i) {
    setup.truth_spot.values.push_back(
        30.0 + 10.0 * std::sin(2.0 * 3.14159265358979323846 * i / 24.0));
  }
  setup.battery.capacity_mwh = 10.0;
  setup.battery.charge_power_mw = 10.0;
  setup.battery.discharge_power_mw = 10.0;
  setup.battery.efficiency = 0.95;
  setup.battery.soc_initial_mwh = 2.0;
  setup.model.uncertainty_factor = 1.0;
  setup.stride_steps = 3;
  setup.interval_steps = 3;
  setup.forecast_horizon_steps = 24;
  setup.forecast_seed = 9;

  const HorizonCurve c = hzn::sweep_horizons(setup, {3, 6, 12});
  CHECK(c.horizons_h == std::vector<double>{3.0, 6.0, 12.0});
  CHECK(c.revenues_eur.size() == 3);
  const HorizonCurve again = hzn::sweep_horizons(setup, {3, 6, 12});
  CHECK(c.revenues_eur == again.revenues_eur);

  CHECK_THROWS(hzn::sweep_horizons(setup, {}));
  CHECK_THROWS(hzn::sweep_horizons(setup, {6, 3}));
}
