#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hzn/series.hpp"

namespace hzn {

/// One sinusoidal term A * sin(2*pi*f*t + phi), t in hours.
struct HarmonicComponent {
  double amplitude = 0.0;       // >= 0
  double frequency_per_hour = 0.0;  // > 0
  double phase_rad = 0.0;
};

/** Seasonal ARIMA simulation parameters, (p,d,q)x(P,D,Q)_s with Gaussian
 * innovations. Coefficient signs follow the usual convention
 *   (1 - ar_1 B - ...)(1 - sar_1 B^s - ...) w_t = (1 + ma_1 B + ...)(1 + sma_1 B^s + ...) e_t
 * so the values reported by common fitting packages drop in unchanged.
 */
struct SarimaParams {
  std::vector<double> ar;    // p coefficients
  std::vector<double> ma;    // q coefficients
  std::vector<double> sar;   // P coefficients
  std::vector<double> sma;   // Q coefficients
  int d = 0;                 // 0 or 1
  int seasonal_d = 0;        // 0 or 1
  int season = 1;            // s, steps per season, >= 1
  double innovation_variance = 1.0;  // >= 0

  int p() const { return static_cast<int>(ar.size()); }
  int q() const { return static_cast<int>(ma.size()); }
  int seasonal_p() const { return static_cast<int>(sar.size()); }
  int seasonal_q() const { return static_cast<int>(sma.size()); }
};

struct ScaleRange {
  double lo = 0.0;
  double hi = 0.0;
};

/** Full recipe for one synthetic price series: a Fourier backbone, optionally
 * shaped and rescaled, plus a weighted SARIMA distortion, optionally clipped.
 *
 * `scale_range` is the target range of the shaped backbone. When absent the
 * backbone is used as generated (only valid with shape_exponent == 1).
 */
struct SignalSpec {
  std::vector<HarmonicComponent> harmonics;
  double shape_exponent = 1.0;             // gamma > 0
  std::optional<ScaleRange> scale_range;
  SarimaParams sarima;
  double sarima_weight = 0.0;              // alpha >= 0
  int length = 336;                        // number of samples
  double step_hours = 1.0;
  std::optional<ScaleRange> clip_bounds;
  std::uint64_t seed = 0;
};

/// Sum of harmonics sampled at t = 0, step, 2*step, ... (`length` samples).
Series fourier_backbone(const std::vector<HarmonicComponent>& harmonics,
                        int length, double step_hours);

/** Min-max normalizes to [-1, 1], applies sign(x)*|x|^gamma, then affinely
 * maps the result onto [target.lo, target.hi]. The normalized extremes are
 * fixed points of the shaping, so output min/max equal the target bounds.
 */
Series shape_and_scale(const Series& raw, double gamma, ScaleRange target);

/** Simulates the SARIMA process and returns `length` samples after discarding
 * a burn-in of 10*s steps. Differencing orders d, D <= 1 are realized by
 * cumulative summation (seasonal first) of the stationary core. Per-coefficient
 * stability guard: every AR and seasonal AR coefficient must lie in (-1, 1).
 */
Series simulate_sarima(const SarimaParams& params, int length, double step_hours,
                       std::uint64_t seed);

/// Shaped backbone + sarima_weight * SARIMA realization, clipped if requested.
Series compose_ground_truth(const SignalSpec& spec);

/** Mean absolute one-step move per day, a proxy for the revenue available to
 * a fast storage trader: sum_t |p(t+1) - p(t)| / D with D = steps/day and
 * steps = size - 1. Requires size >= 2 and step_hours dividing 24.
 */
double revenue_proxy(const Series& s);

/** Amplitude A such that A * sin(2*pi*t/period) has revenue proxy `target`.
 * `steps` counts one-step increments (a two-week hourly study is 336 steps,
 * i.e. 337 samples); the divisor day count is steps * step_hours / 24.
 */
double amplitude_for_target(double target_eur_per_day, double period_hours,
                            int steps, double step_hours);

/** Least-squares fit of the series onto {sin, cos} pairs at frequencies
 * k / base_period_hours, k = 1..n. Returns n components with amplitude and
 * phase folded together. The series must be strictly longer than the basis
 * (size >= 2n + 1), otherwise the design is rank-deficient and this throws.
 */
std::vector<HarmonicComponent> fit_harmonics(const Series& s, int n_harmonics,
                                             double base_period_hours);

}  // namespace hzn
