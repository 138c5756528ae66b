#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hzn/forecast.hpp"
#include "hzn/milp.hpp"
#include "hzn/series.hpp"

namespace hzn {

/// Revenue as a function of planning horizon. Horizons strictly increasing.
struct HorizonCurve {
  std::vector<double> horizons_h;
  std::vector<double> revenues_eur;
};

struct SweepResult {
  HorizonCurve curve;
  double h_opt = 0.0;   // smallest horizon attaining the curve maximum
  double h_eff = 0.0;   // effective horizon of the designated reference curve
  double gap_h = 0.0;   // h_eff - h_opt, signed
  bool gap_negative = false;
  std::optional<double> loss_pct;  // empty when the curve maximum is <= 0
  double epsilon = 1e-3;
};

/// Smallest horizon whose revenue reaches (1 - epsilon) * max. For a
/// non-positive maximum the threshold is max - epsilon * |max|.
double effective_horizon(const HorizonCurve& curve, double epsilon);

/// Horizon of the curve maximum; ties resolve to the smallest horizon.
double optimal_horizon(const HorizonCurve& curve);

/// h_eff - h_opt, unclamped. Negative values are meaningful and flagged by
/// the callers that record them.
double uncertainty_gap(double h_eff, double h_opt);

/// Largest percentage drop at or beyond the optimum:
/// 100 * (max - min_{h >= h_opt}) / max. Undefined when max <= 0.
std::optional<double> loss_beyond_optimum(const HorizonCurve& curve);

/// Derives all metrics for a forecast curve, taking h_eff from `reference`
/// (pass the curve itself when no separate reference exists).
SweepResult analyze_curve(const HorizonCurve& curve,
                          const HorizonCurve& reference, double epsilon);

/// Everything one (dataset, battery, uncertainty, seed) sweep needs.
struct SweepSetup {
  Series truth_spot;
  BatterySpec battery;
  MarketParams market;
  ErrorModel model;            // uncertainty_factor included
  int stride_steps = 3;
  int interval_steps = 3;      // forecast publication interval
  int forecast_horizon_steps = 72;
  std::uint64_t forecast_seed = 0;
};

/** Runs one MPC experiment per horizon, all against the same forecast
 * realization (one ForecastSet drawn up front), so the curve varies only in
 * the planning horizon. Horizons in steps, strictly increasing.
 */
HorizonCurve sweep_horizons(const SweepSetup& setup,
                            const std::vector<int>& horizons_steps);

}  // namespace hzn
