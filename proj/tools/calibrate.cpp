// Maintenance helper for the signal catalog. Given a dataset id and a target
// revenue proxy it reports the scale range that makes the shaped backbone hit
// that proxy, plus the stationary spread of the dataset's residual process so
// a sensible sarima weight can be picked. The chosen numbers are frozen into
// catalogs/signals.json by hand; nothing at runtime depends on this tool.

#include <cmath>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hzn/catalog.hpp"
#include "hzn/signal.hpp"

int main(int argc, char** argv) {
  CLI::App app{"catalog calibration helper"};
  std::string catalogs = "catalogs";
  std::string dataset;
  double target = 0.0;
  double center = 45.0;
  app.add_option("--catalogs", catalogs, "catalog directory")
      ->capture_default_str();
  app.add_option("--dataset", dataset, "dataset id")->required();
  app.add_option("--target-proxy", target, "revenue proxy to hit, EUR/MWh/day")
      ->required();
  app.add_option("--center", center, "price level the range is centered on")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const hzn::Catalogs cat = hzn::load_catalogs(catalogs);
    hzn::SignalSpec spec = cat.dataset(dataset).signal;
    spec.scale_range = hzn::ScaleRange{-1.0, 1.0};
    spec.sarima_weight = 0.0;
    const hzn::Series unit = hzn::compose_ground_truth(spec);
    const double unit_proxy = hzn::revenue_proxy(unit);
    const double half_width = target / unit_proxy;
    std::cout << "shaped backbone proxy at unit half-width: "
              << hzn::format_number(unit_proxy) << "\n";
    std::cout << "half-width for target " << hzn::format_number(target) << ": "
              << hzn::format_number(half_width) << "\n";
    std::cout << "scale_range: {\"lo\": "
              << hzn::format_number(center - half_width) << ", \"hi\": "
              << hzn::format_number(center + half_width) << "}\n";

    const hzn::SignalSpec& orig = cat.dataset(dataset).signal;
    if (orig.sarima.innovation_variance > 0.0 &&
        (!orig.sarima.ar.empty() || !orig.sarima.sar.empty() ||
         !orig.sarima.ma.empty() || !orig.sarima.sma.empty())) {
      const std::size_t n = 20000;
      const hzn::Series res =
          hzn::simulate_sarima(orig.sarima, n, spec.step_hours, 123);
      double mean = 0.0;
      for (std::size_t i = n / 2; i < n; ++i) mean += res.values[i];
      mean /= static_cast<double>(n - n / 2);
      double var = 0.0;
      for (std::size_t i = n / 2; i < n; ++i) {
        var += (res.values[i] - mean) * (res.values[i] - mean);
      }
      var /= static_cast<double>(n - n / 2 - 1);
      const double sd = std::sqrt(var);
      std::cout << "residual stationary sd: " << hzn::format_number(sd) << "\n";
      std::cout << "weight for residual sd = half of half-width: "
                << hzn::format_number(0.5 * half_width / sd) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
