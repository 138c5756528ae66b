#include "hzn/forecast.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "hzn/rng.hpp"

namespace hzn {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_model(const ErrorModel& m) {
  if (!(m.rho >= 0.0 && m.rho < 1.0)) {
    throw std::invalid_argument("error model: rho must be in [0, 1)");
  }
  if (!(m.sigma_base >= 0.0)) {
    throw std::invalid_argument("error model: sigma_base must be >= 0");
  }
  if (!(m.uncertainty_factor >= 0.0)) {
    throw std::invalid_argument("error model: uncertainty factor must be >= 0");
  }
  switch (m.growth) {
    case SigmaGrowth::linear:
      if (!(m.slope_per_hour >= 0.0)) {
        throw std::invalid_argument("error model: linear slope must be >= 0");
      }
      break;
    case SigmaGrowth::exponential:
      if (!(m.rate_per_hour >= 0.0)) {
        throw std::invalid_argument("error model: exponential rate must be >= 0");
      }
      break;
    case SigmaGrowth::seasonal:
      if (!(m.slope_per_hour >= 0.0)) {
        throw std::invalid_argument("error model: seasonal slope must be >= 0");
      }
      if (!(m.period_hours > 0.0)) {
        throw std::invalid_argument("error model: seasonal period must be > 0");
      }
      break;
  }
}

// sigma(lead) for uncertainty factor 1; may dip below 0 only for the seasonal
// profile, which the callers floor (and count).
double unit_sigma(const ErrorModel& m, double lead_hours) {
  switch (m.growth) {
    case SigmaGrowth::linear:
      return m.sigma_base + m.slope_per_hour * lead_hours;
    case SigmaGrowth::exponential:
      return m.sigma_base * std::exp(m.rate_per_hour * lead_hours);
    case SigmaGrowth::seasonal:
      return (m.sigma_base + m.slope_per_hour * lead_hours) *
             (1.0 + m.modulation * std::sin(kTwoPi * lead_hours / m.period_hours));
  }
  return 0.0;
}

}  // namespace

const Forecast& ForecastSet::latest_at(int step) const {
  if (forecasts.empty()) {
    throw std::runtime_error("forecast set is empty");
  }
  const int idx = std::min(step / interval_steps,
                           static_cast<int>(forecasts.size()) - 1);
  const Forecast& f = forecasts[static_cast<std::size_t>(idx)];
  if (f.issue_step > step) {
    throw std::runtime_error("no forecast issued at or before requested step");
  }
  return f;
}

std::vector<double> ar1_error_path(double rho, int length, std::uint64_t seed) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("ar1_error_path: rho must be in [0, 1)");
  }
  if (length < 1) {
    throw std::invalid_argument("ar1_error_path: length must be >= 1");
  }
  Rng rng(seed);
  std::vector<double> e(static_cast<std::size_t>(length));
  const double innov_scale = std::sqrt(1.0 - rho * rho);
  e[0] = rng.normal();
  for (int t = 1; t < length; ++t) {
    e[static_cast<std::size_t>(t)] =
        rho * e[static_cast<std::size_t>(t - 1)] + innov_scale * rng.normal();
  }
  return e;
}

double sigma_profile(const ErrorModel& model, double lead_hours) {
  check_model(model);
  const double s = unit_sigma(model, lead_hours);
  return model.uncertainty_factor * (s > 0.0 ? s : 0.0);
}

ForecastSet issue_forecasts(const Series& truth, const ErrorModel& model,
                            int interval_steps, int horizon_steps,
                            std::uint64_t seed) {
  check_model(model);
  if (interval_steps < 1) {
    throw std::invalid_argument("issue_forecasts: interval must be >= 1 step");
  }
  if (horizon_steps < 1) {
    throw std::invalid_argument("issue_forecasts: horizon must be >= 1 step");
  }
  if (truth.empty()) {
    throw std::invalid_argument("issue_forecasts: empty ground truth");
  }

  const int n = static_cast<int>(truth.size());
  ForecastSet fs;
  fs.interval_steps = interval_steps;
  fs.horizon_steps = horizon_steps;
  fs.step_hours = truth.step_hours;

  int issuance = 0;
  for (int t = 0; t < n; t += interval_steps, ++issuance) {
    const int len = std::min(horizon_steps, n - t);
    const auto path =
        ar1_error_path(model.rho, len,
                       seed_combine(seed, static_cast<std::uint64_t>(issuance)));
    Forecast f;
    f.issue_step = t;
    f.values.step_hours = truth.step_hours;
    f.values.values.resize(static_cast<std::size_t>(len));
    for (int l = 0; l < len; ++l) {
      double su = unit_sigma(model, l * truth.step_hours);
      if (su < 0.0) {
        su = 0.0;
        ++fs.sigma_clamp_count;
      }
      // The factor multiplies last so that errors scale exactly with it.
      f.values.values[static_cast<std::size_t>(l)] =
          truth.values[static_cast<std::size_t>(t + l)] + model.mean_bias +
          model.uncertainty_factor * (su * path[static_cast<std::size_t>(l)]);
    }
    fs.forecasts.push_back(std::move(f));
  }
  return fs;
}

void write_forecasts_csv(const ForecastSet& fs,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << "issue_step,lead_hours,value_eur_mwh\n";
  for (const auto& f : fs.forecasts) {
    for (std::size_t l = 0; l < f.values.size(); ++l) {
      out << f.issue_step << ',' << format_number(f.values.t_hours(l)) << ','
          << format_number(f.values.values[l]) << '\n';
    }
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace hzn
