#include "hzn/signal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hzn/rng.hpp"

namespace hzn {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_harmonics(const std::vector<HarmonicComponent>& harmonics) {
  if (harmonics.empty()) {
    throw std::invalid_argument("fourier_backbone: no harmonics given");
  }
  for (const auto& h : harmonics) {
    if (!(h.amplitude >= 0.0)) {
      throw std::invalid_argument("harmonic amplitude must be >= 0");
    }
    if (!(h.frequency_per_hour > 0.0)) {
      throw std::invalid_argument("harmonic frequency must be > 0");
    }
  }
}

// Coefficient product of two lag polynomials.
std::vector<double> poly_mul(const std::vector<double>& a,
                             const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

// (1 - c_1 B^s - c_2 B^2s - ...) for sign = -1, (1 + ...) for sign = +1.
std::vector<double> lag_poly(const std::vector<double>& coeffs, int stride,
                             double sign) {
  std::vector<double> p(coeffs.size() * stride + 1, 0.0);
  p[0] = 1.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    p[(i + 1) * stride] = sign * coeffs[i];
  }
  return p;
}

void check_sarima(const SarimaParams& params) {
  if (params.season < 1) {
    throw std::invalid_argument("sarima: season must be >= 1");
  }
  if (params.d < 0 || params.d > 1 || params.seasonal_d < 0 ||
      params.seasonal_d > 1) {
    throw std::invalid_argument("sarima: differencing orders must be 0 or 1");
  }
  if (!(params.innovation_variance >= 0.0)) {
    throw std::invalid_argument("sarima: innovation variance must be >= 0");
  }
  for (double c : params.ar) {
    if (!(std::abs(c) < 1.0)) {
      throw std::invalid_argument("sarima: unstable ar coefficient " +
                                  std::to_string(c));
    }
  }
  for (double c : params.sar) {
    if (!(std::abs(c) < 1.0)) {
      throw std::invalid_argument("sarima: unstable seasonal ar coefficient " +
                                  std::to_string(c));
    }
  }
}

}  // namespace

Series fourier_backbone(const std::vector<HarmonicComponent>& harmonics,
                        int length, double step_hours) {
  check_harmonics(harmonics);
  if (length < 1) {
    throw std::invalid_argument("fourier_backbone: length must be >= 1");
  }
  if (!(step_hours > 0.0)) {
    throw std::invalid_argument("fourier_backbone: step_hours must be > 0");
  }
  Series s(step_hours, std::vector<double>(static_cast<std::size_t>(length), 0.0));
  for (int t = 0; t < length; ++t) {
    const double hours = t * step_hours;
    double v = 0.0;
    for (const auto& h : harmonics) {
      v += h.amplitude *
           std::sin(kTwoPi * h.frequency_per_hour * hours + h.phase_rad);
    }
    s.values[static_cast<std::size_t>(t)] = v;
  }
  return s;
}

Series shape_and_scale(const Series& raw, double gamma, ScaleRange target) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("shape_and_scale: exponent must be > 0");
  }
  if (!(target.lo < target.hi)) {
    throw std::invalid_argument("shape_and_scale: target range must have lo < hi");
  }
  const auto [mn_it, mx_it] =
      std::minmax_element(raw.values.begin(), raw.values.end());
  if (raw.values.empty() || !(*mn_it < *mx_it)) {
    throw std::invalid_argument(
        "shape_and_scale: degenerate input, all values equal");
  }
  const double mn = *mn_it;
  const double span = *mx_it - mn;
  Series out(raw.step_hours, raw.values);
  for (double& v : out.values) {
    const double unit = 2.0 * (v - mn) / span - 1.0;  // [-1, 1]
    const double shaped =
        std::copysign(std::pow(std::abs(unit), gamma), unit);
    v = (shaped + 1.0) * 0.5 * (target.hi - target.lo) + target.lo;
  }
  return out;
}

Series simulate_sarima(const SarimaParams& params, int length, double step_hours,
                       std::uint64_t seed) {
  check_sarima(params);
  if (length < 1) {
    throw std::invalid_argument("simulate_sarima: length must be >= 1");
  }
  if (!(step_hours > 0.0)) {
    throw std::invalid_argument("simulate_sarima: step_hours must be > 0");
  }

  // Multiplicative seasonal polynomials expanded to plain lag coefficients.
  const auto phi = poly_mul(lag_poly(params.ar, 1, -1.0),
                            lag_poly(params.sar, params.season, -1.0));
  const auto theta = poly_mul(lag_poly(params.ma, 1, 1.0),
                              lag_poly(params.sma, params.season, 1.0));

  const int burn = 10 * params.season;
  const int total = burn + length;
  const double sigma = std::sqrt(params.innovation_variance);

  Rng rng(seed);
  std::vector<double> e(static_cast<std::size_t>(total));
  for (double& v : e) {
    v = sigma * rng.normal();
  }

  std::vector<double> w(static_cast<std::size_t>(total), 0.0);
  const int na = static_cast<int>(phi.size());
  const int nm = static_cast<int>(theta.size());
  for (int t = 0; t < total; ++t) {
    double v = e[static_cast<std::size_t>(t)];
    for (int k = 1; k < na && k <= t; ++k) {
      v -= phi[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(t - k)];
    }
    for (int k = 1; k < nm && k <= t; ++k) {
      v += theta[static_cast<std::size_t>(k)] * e[static_cast<std::size_t>(t - k)];
    }
    w[static_cast<std::size_t>(t)] = v;
  }

  std::vector<double> z(w.begin() + burn, w.end());
  if (params.seasonal_d == 1) {
    for (int t = params.season; t < length; ++t) {
      z[static_cast<std::size_t>(t)] += z[static_cast<std::size_t>(t - params.season)];
    }
  }
  if (params.d == 1) {
    for (int t = 1; t < length; ++t) {
      z[static_cast<std::size_t>(t)] += z[static_cast<std::size_t>(t - 1)];
    }
  }
  return Series(step_hours, std::move(z));
}

Series compose_ground_truth(const SignalSpec& spec) {
  if (!(spec.sarima_weight >= 0.0)) {
    throw std::invalid_argument("compose_ground_truth: sarima weight must be >= 0");
  }
  Series backbone =
      fourier_backbone(spec.harmonics, spec.length, spec.step_hours);
  if (spec.scale_range) {
    backbone = shape_and_scale(backbone, spec.shape_exponent, *spec.scale_range);
  } else if (spec.shape_exponent != 1.0) {
    throw std::invalid_argument(
        "compose_ground_truth: shaping exponent != 1 requires a scale range");
  }
  if (spec.sarima_weight != 0.0) {
    const Series z =
        simulate_sarima(spec.sarima, spec.length, spec.step_hours, spec.seed);
    for (std::size_t i = 0; i < backbone.size(); ++i) {
      backbone.values[i] += spec.sarima_weight * z.values[i];
    }
  }
  if (spec.clip_bounds) {
    if (!(spec.clip_bounds->lo <= spec.clip_bounds->hi)) {
      throw std::invalid_argument("compose_ground_truth: clip bounds inverted");
    }
    for (double& v : backbone.values) {
      v = std::clamp(v, spec.clip_bounds->lo, spec.clip_bounds->hi);
    }
  }
  return backbone;
}

double revenue_proxy(const Series& s) {
  if (s.size() < 2) {
    throw std::invalid_argument("revenue_proxy: need at least two samples");
  }
  if (!(s.step_hours > 0.0)) {
    throw std::invalid_argument("revenue_proxy: step_hours must be > 0");
  }
  const double per_day = 24.0 / s.step_hours;
  if (std::abs(per_day - std::round(per_day)) > 1e-6) {
    throw std::invalid_argument("revenue_proxy: step_hours must divide 24");
  }
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    tv += std::abs(s.values[i + 1] - s.values[i]);
  }
  const double days =
      static_cast<double>(s.size() - 1) * s.step_hours / 24.0;
  return tv / days;
}

double amplitude_for_target(double target_eur_per_day, double period_hours,
                            int steps, double step_hours) {
  if (!(target_eur_per_day > 0.0)) {
    throw std::invalid_argument("amplitude_for_target: target must be > 0");
  }
  if (!(period_hours > 0.0) || !(step_hours > 0.0) || steps < 1) {
    throw std::invalid_argument("amplitude_for_target: bad sampling parameters");
  }
  const double omega = kTwoPi / period_hours;
  double tv = 0.0;
  double prev = 0.0;  // sin(0)
  for (int t = 1; t <= steps; ++t) {
    const double cur = std::sin(omega * t * step_hours);
    tv += std::abs(cur - prev);
    prev = cur;
  }
  if (tv <= 0.0) {
    throw std::invalid_argument(
        "amplitude_for_target: sampling grid sees no variation of the sine");
  }
  const double days = steps * step_hours / 24.0;
  return target_eur_per_day / (tv / days);
}

std::vector<HarmonicComponent> fit_harmonics(const Series& s, int n_harmonics,
                                             double base_period_hours) {
  if (n_harmonics < 1) {
    throw std::invalid_argument("fit_harmonics: need at least one harmonic");
  }
  if (!(base_period_hours > 0.0)) {
    throw std::invalid_argument("fit_harmonics: base period must be > 0");
  }
  const int n = static_cast<int>(s.size());
  if (n < 2 * n_harmonics + 1) {
    throw std::invalid_argument(
        "fit_harmonics: series shorter than the harmonic basis (rank-deficient)");
  }

  Eigen::MatrixXd design(n, 2 * n_harmonics);
  for (int t = 0; t < n; ++t) {
    const double hours = t * s.step_hours;
    for (int k = 0; k < n_harmonics; ++k) {
      const double arg = kTwoPi * (k + 1) / base_period_hours * hours;
      design(t, 2 * k) = std::sin(arg);
      design(t, 2 * k + 1) = std::cos(arg);
    }
  }
  Eigen::VectorXd y(n);
  for (int t = 0; t < n; ++t) {
    y(t) = s.values[static_cast<std::size_t>(t)];
  }
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);

  std::vector<HarmonicComponent> out;
  out.reserve(static_cast<std::size_t>(n_harmonics));
  for (int k = 0; k < n_harmonics; ++k) {
    const double a = beta(2 * k);      // sin weight
    const double b = beta(2 * k + 1);  // cos weight
    HarmonicComponent h;
    h.amplitude = std::hypot(a, b);
    h.frequency_per_hour = (k + 1) / base_period_hours;
    h.phase_rad = std::atan2(b, a);
    out.push_back(h);
  }
  return out;
}

}  // namespace hzn
