#pragma once

#include <cstdint>
#include <vector>

#include "hzn/series.hpp"

namespace hzn {

enum class SigmaGrowth { linear, exponential, seasonal };

/** Forecast error model: AR(1)-correlated standard errors scaled by a
 * horizon-dependent sigma profile and a global uncertainty factor.
 *
 * sigma(lead) for uncertainty_factor u:
 *   linear       u * (sigma_base + slope_per_hour * lead)
 *   exponential  u * sigma_base * exp(rate_per_hour * lead)
 *   seasonal     u * (sigma_base + slope_per_hour * lead)
 *                  * (1 + modulation * sin(2*pi*lead / period_hours)), floored at 0
 */
struct ErrorModel {
  double rho = 0.7;             // AR(1) coefficient, 0 <= rho < 1
  double mean_bias = 0.0;       // additive bias, EUR/MWh
  double sigma_base = 2.0;      // EUR/MWh at lead 0
  SigmaGrowth growth = SigmaGrowth::linear;
  double slope_per_hour = 0.2;  // linear, seasonal
  double rate_per_hour = 0.0;   // exponential
  double modulation = 0.0;      // seasonal, |m| typically < 1
  double period_hours = 24.0;   // seasonal
  double uncertainty_factor = 1.0;  // >= 0
};

/// One published forecast: values[l] predicts truth at step issue_step + l.
struct Forecast {
  int issue_step = 0;
  Series values;
};

struct ForecastSet {
  int interval_steps = 1;   // publication interval
  int horizon_steps = 1;    // nominal forecast length (tails are truncated)
  double step_hours = 1.0;
  std::vector<Forecast> forecasts;
  int sigma_clamp_count = 0;  // seasonal profile floor activations

  /// Latest forecast issued at or before `step` (issue steps are regular).
  const Forecast& latest_at(int step) const;
};

/** Correlated standard error path: e_0 ~ N(0,1),
 * e_t = rho * e_{t-1} + sqrt(1 - rho^2) * n_t. Every element has unit
 * variance, and corr(e_t, e_{t+1}) = rho. Fully determined by the seed.
 */
std::vector<double> ar1_error_path(double rho, int length, std::uint64_t seed);

/// sigma(lead) including the uncertainty factor; never negative.
double sigma_profile(const ErrorModel& model, double lead_hours);

/** Publishes forecasts every `interval_steps` while any study step remains
 * (issue steps 0, interval, ..., the last one below truth.size()). Each covers
 * min(horizon_steps, remaining) steps; value = truth + bias + sigma * error
 * with a fresh AR(1) path per issuance, seeded by (seed, issuance index).
 *
 * The uncertainty factor enters as a final multiplier on the error term, so
 * runs differing only in the factor have exactly proportional errors.
 */
ForecastSet issue_forecasts(const Series& truth, const ErrorModel& model,
                            int interval_steps, int horizon_steps,
                            std::uint64_t seed);

/// Writes `issue_step,lead_hours,value_eur_mwh` rows.
void write_forecasts_csv(const ForecastSet& fs, const std::filesystem::path& path);

}  // namespace hzn
