#include "hzn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hzn/mpc.hpp"

namespace hzn {

namespace {

void check_curve(const HorizonCurve& curve) {
  if (curve.horizons_h.empty() ||
      curve.horizons_h.size() != curve.revenues_eur.size()) {
    throw std::invalid_argument("horizon curve is empty or ragged");
  }
  for (std::size_t i = 1; i < curve.horizons_h.size(); ++i) {
    if (!(curve.horizons_h[i] > curve.horizons_h[i - 1])) {
      throw std::invalid_argument("horizons must be strictly increasing");
    }
  }
}

std::size_t argmax_smallest(const HorizonCurve& curve) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.revenues_eur.size(); ++i) {
    if (curve.revenues_eur[i] > curve.revenues_eur[best]) best = i;
  }
  return best;
}

}  // namespace

double optimal_horizon(const HorizonCurve& curve) {
  check_curve(curve);
  return curve.horizons_h[argmax_smallest(curve)];
}

double effective_horizon(const HorizonCurve& curve, double epsilon) {
  check_curve(curve);
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be >= 0");
  }
  const double max = curve.revenues_eur[argmax_smallest(curve)];
  const double threshold =
      max > 0.0 ? (1.0 - epsilon) * max : max - epsilon * std::abs(max);
  for (std::size_t i = 0; i < curve.revenues_eur.size(); ++i) {
    if (curve.revenues_eur[i] >= threshold) return curve.horizons_h[i];
  }
  return curve.horizons_h.back();  // unreachable: the max itself qualifies
}

double uncertainty_gap(double h_eff, double h_opt) { return h_eff - h_opt; }

std::optional<double> loss_beyond_optimum(const HorizonCurve& curve) {
  check_curve(curve);
  const std::size_t opt = argmax_smallest(curve);
  const double max = curve.revenues_eur[opt];
  if (!(max > 0.0)) return std::nullopt;
  double min_tail = max;
  for (std::size_t i = opt; i < curve.revenues_eur.size(); ++i) {
    min_tail = std::min(min_tail, curve.revenues_eur[i]);
  }
  return 100.0 * (max - min_tail) / max;
}

SweepResult analyze_curve(const HorizonCurve& curve,
                          const HorizonCurve& reference, double epsilon) {
  SweepResult r;
  r.curve = curve;
  r.epsilon = epsilon;
  r.h_opt = optimal_horizon(curve);
  r.h_eff = effective_horizon(reference, epsilon);
  r.gap_h = uncertainty_gap(r.h_eff, r.h_opt);
  r.gap_negative = r.gap_h < 0.0;
  r.loss_pct = loss_beyond_optimum(curve);
  return r;
}

HorizonCurve sweep_horizons(const SweepSetup& setup,
                            const std::vector<int>& horizons_steps) {
  if (horizons_steps.empty()) {
    throw std::invalid_argument("sweep_horizons: no horizons given");
  }
  for (std::size_t i = 0; i < horizons_steps.size(); ++i) {
    if (horizons_steps[i] < 1 ||
        (i > 0 && horizons_steps[i] <= horizons_steps[i - 1])) {
      throw std::invalid_argument(
          "sweep_horizons: horizons must be strictly increasing and >= 1");
    }
  }
  const ForecastSet forecasts =
      issue_forecasts(setup.truth_spot, setup.model, setup.interval_steps,
                      setup.forecast_horizon_steps, setup.forecast_seed);
  HorizonCurve curve;
  curve.horizons_h.reserve(horizons_steps.size());
  curve.revenues_eur.reserve(horizons_steps.size());
  for (int h : horizons_steps) {
    MpcConfig cfg;
    cfg.horizon_steps = h;
    cfg.stride_steps = setup.stride_steps;
    const MpcRun run = run_mpc(setup.truth_spot, forecasts, setup.battery,
                               setup.market, cfg);
    curve.horizons_h.push_back(h * setup.truth_spot.step_hours);
    curve.revenues_eur.push_back(run.realized_revenue_eur);
  }
  return curve;
}

}  // namespace hzn
