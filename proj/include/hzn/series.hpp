#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace hzn {

/// Uniformly sampled time series. Sample i sits at t = i * step_hours.
struct Series {
  double step_hours = 1.0;
  std::vector<double> values;

  Series() = default;
  Series(double step, std::vector<double> v)
      : step_hours(step), values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double t_hours(std::size_t i) const { return static_cast<double>(i) * step_hours; }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// Stable float-to-text used for every CSV cell so that reruns are
/// byte-identical. %.10g keeps full practical precision without trailing noise.
std::string format_number(double v);

/// Writes `t_hours,<value_header>` rows.
void write_series_csv(const Series& s, const std::filesystem::path& path,
                      const std::string& value_header = "value_eur_mwh");

}  // namespace hzn
