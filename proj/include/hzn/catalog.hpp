#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hzn/forecast.hpp"
#include "hzn/milp.hpp"
#include "hzn/signal.hpp"

namespace hzn {

struct DatasetEntry {
  std::string id;        // unique, referenced by plans
  std::string family;    // sine / da / mfrr
  std::string instance;  // variant within the family
  std::string label;
  SignalSpec signal;
  // Revenue proxy of the real-world sample the family calibration targeted.
  // Reference metadata only; nothing recomputes it.
  std::optional<double> reference_proxy_eur_day;
};

struct BatteryEntry {
  std::string id;
  std::string label;
  double duration_h = 0.0;  // nominal full-discharge duration
  BatterySpec spec;
};

struct ErrorModelEntry {
  std::string id;
  ErrorModel model;
};

struct Catalogs {
  std::vector<DatasetEntry> datasets;
  std::vector<BatteryEntry> batteries;
  std::vector<ErrorModelEntry> error_models;

  const DatasetEntry& dataset(const std::string& id) const;
  const BatteryEntry& battery(const std::string& id) const;
  const ErrorModelEntry& error_model(const std::string& id) const;
};

/** Loads signals.json, batteries.json and error_models.json from `dir`.
 * Validates shape and value ranges; throws std::runtime_error naming the
 * file, entry and field on any violation.
 */
Catalogs load_catalogs(const std::filesystem::path& dir);

}  // namespace hzn
