#include "hzn/catalog.hpp"

#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace hzn {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& file, const std::string& entry,
                       const std::string& msg) {
  std::string where = file;
  if (!entry.empty()) where += " [" + entry + "]";
  throw std::runtime_error(where + ": " + msg);
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open catalog file: " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

const json& member(const json& obj, const char* key, const std::string& file,
                   const std::string& entry) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(file, entry, std::string("missing field '") + key + "'");
  }
  return *it;
}

double number_field(const json& obj, const char* key, const std::string& file,
                    const std::string& entry) {
  const json& v = member(obj, key, file, entry);
  if (!v.is_number()) {
    fail(file, entry, std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback,
                 const std::string& file, const std::string& entry) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) {
    fail(file, entry, std::string("field '") + key + "' must be a number");
  }
  return it->get<double>();
}

std::string string_field(const json& obj, const char* key,
                         const std::string& file, const std::string& entry) {
  const json& v = member(obj, key, file, entry);
  if (!v.is_string()) {
    fail(file, entry, std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<double> number_array_or(const json& obj, const char* key,
                                    const std::string& file,
                                    const std::string& entry) {
  auto it = obj.find(key);
  std::vector<double> out;
  if (it == obj.end()) return out;
  if (!it->is_array()) {
    fail(file, entry, std::string("field '") + key + "' must be an array");
  }
  for (const json& v : *it) {
    if (!v.is_number()) {
      fail(file, entry,
           std::string("field '") + key + "' must contain numbers only");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

ScaleRange range_field(const json& obj, const std::string& file,
                       const std::string& entry) {
  ScaleRange r;
  r.lo = number_field(obj, "lo", file, entry);
  r.hi = number_field(obj, "hi", file, entry);
  if (!(r.lo < r.hi)) {
    fail(file, entry, "range needs lo < hi");
  }
  return r;
}

SignalSpec parse_signal(const json& sig, const std::string& file,
                        const std::string& entry) {
  SignalSpec spec;
  spec.length = static_cast<std::size_t>(number_field(sig, "length", file, entry));
  spec.step_hours = number_or(sig, "step_hours", 1.0, file, entry);
  if (spec.length < 2 || !(spec.step_hours > 0.0)) {
    fail(file, entry, "signal needs length >= 2 and step_hours > 0");
  }
  spec.seed = static_cast<std::uint64_t>(number_field(sig, "seed", file, entry));

  const json& harmonics = member(sig, "harmonics", file, entry);
  if (!harmonics.is_array() || harmonics.empty()) {
    fail(file, entry, "field 'harmonics' must be a non-empty array");
  }
  for (const json& h : harmonics) {
    HarmonicComponent c;
    c.amplitude = number_field(h, "amplitude", file, entry);
    const bool has_period = h.contains("period_hours");
    const bool has_freq = h.contains("frequency_per_hour");
    if (has_period == has_freq) {
      fail(file, entry,
           "each harmonic needs exactly one of period_hours / frequency_per_hour");
    }
    if (has_period) {
      const double period = number_field(h, "period_hours", file, entry);
      if (!(period > 0.0)) fail(file, entry, "period_hours must be > 0");
      c.frequency_per_hour = 1.0 / period;
    } else {
      c.frequency_per_hour = number_field(h, "frequency_per_hour", file, entry);
    }
    c.phase_rad = number_or(h, "phase_rad", 0.0, file, entry);
    spec.harmonics.push_back(c);
  }

  spec.shape_exponent = number_or(sig, "shape_exponent", 1.0, file, entry);
  if (sig.contains("scale_range")) {
    spec.scale_range = range_field(sig.at("scale_range"), file, entry);
  }
  if (sig.contains("clip")) {
    spec.clip_bounds = range_field(sig.at("clip"), file, entry);
  }

  spec.sarima_weight = number_or(sig, "sarima_weight", 0.0, file, entry);
  if (spec.sarima_weight != 0.0 || sig.contains("sarima")) {
    const json& sa = member(sig, "sarima", file, entry);
    spec.sarima.ar = number_array_or(sa, "ar", file, entry);
    spec.sarima.ma = number_array_or(sa, "ma", file, entry);
    spec.sarima.sar = number_array_or(sa, "sar", file, entry);
    spec.sarima.sma = number_array_or(sa, "sma", file, entry);
    spec.sarima.d = static_cast<int>(number_or(sa, "d", 0, file, entry));
    spec.sarima.seasonal_d =
        static_cast<int>(number_or(sa, "seasonal_d", 0, file, entry));
    spec.sarima.season =
        static_cast<int>(number_or(sa, "season", 24, file, entry));
    spec.sarima.innovation_variance =
        number_field(sa, "innovation_variance", file, entry);
  }
  return spec;
}

SigmaGrowth parse_growth(const std::string& name, const std::string& file,
                         const std::string& entry) {
  if (name == "linear") return SigmaGrowth::linear;
  if (name == "exponential") return SigmaGrowth::exponential;
  if (name == "seasonal") return SigmaGrowth::seasonal;
  fail(file, entry, "unknown growth '" + name +
                        "' (expected linear, exponential or seasonal)");
}

}  // namespace

const DatasetEntry& Catalogs::dataset(const std::string& id) const {
  for (const auto& d : datasets) {
    if (d.id == id) return d;
  }
  throw std::runtime_error("unknown dataset id '" + id + "'");
}

const BatteryEntry& Catalogs::battery(const std::string& id) const {
  for (const auto& b : batteries) {
    if (b.id == id) return b;
  }
  throw std::runtime_error("unknown battery id '" + id + "'");
}

const ErrorModelEntry& Catalogs::error_model(const std::string& id) const {
  for (const auto& e : error_models) {
    if (e.id == id) return e;
  }
  throw std::runtime_error("unknown error model id '" + id + "'");
}

Catalogs load_catalogs(const std::filesystem::path& dir) {
  Catalogs cat;

  {
    const std::string file = (dir / "signals.json").string();
    const json root = load_json(dir / "signals.json");
    const json& list = member(root, "datasets", file, "");
    if (!list.is_array()) fail(file, "", "'datasets' must be an array");
    std::unordered_set<std::string> seen;
    for (const json& e : list) {
      DatasetEntry d;
      d.id = string_field(e, "id", file, "");
      if (!seen.insert(d.id).second) {
        fail(file, d.id, "duplicate dataset id");
      }
      d.family = string_field(e, "family", file, d.id);
      d.instance = string_field(e, "instance", file, d.id);
      d.label = string_field(e, "label", file, d.id);
      d.signal = parse_signal(member(e, "signal", file, d.id), file, d.id);
      if (e.contains("reference_proxy_eur_day")) {
        d.reference_proxy_eur_day =
            number_field(e, "reference_proxy_eur_day", file, d.id);
      }
      cat.datasets.push_back(std::move(d));
    }
  }

  {
    const std::string file = (dir / "batteries.json").string();
    const json root = load_json(dir / "batteries.json");
    const json& list = member(root, "batteries", file, "");
    if (!list.is_array()) fail(file, "", "'batteries' must be an array");
    std::unordered_set<std::string> seen;
    for (const json& e : list) {
      BatteryEntry b;
      b.id = string_field(e, "id", file, "");
      if (!seen.insert(b.id).second) {
        fail(file, b.id, "duplicate battery id");
      }
      b.label = string_field(e, "label", file, b.id);
      b.duration_h = number_field(e, "duration_h", file, b.id);
      b.spec.capacity_mwh = number_field(e, "capacity_mwh", file, b.id);
      b.spec.charge_power_mw = number_field(e, "charge_power_mw", file, b.id);
      b.spec.discharge_power_mw =
          number_field(e, "discharge_power_mw", file, b.id);
      b.spec.efficiency = number_field(e, "efficiency", file, b.id);
      b.spec.soc_initial_mwh = number_field(e, "soc_initial_mwh", file, b.id);
      try {
        b.spec.validate();
      } catch (const std::exception& ex) {
        fail(file, b.id, ex.what());
      }
      cat.batteries.push_back(std::move(b));
    }
  }

  {
    const std::string file = (dir / "error_models.json").string();
    const json root = load_json(dir / "error_models.json");
    const json& list = member(root, "error_models", file, "");
    if (!list.is_array()) fail(file, "", "'error_models' must be an array");
    std::unordered_set<std::string> seen;
    for (const json& e : list) {
      ErrorModelEntry m;
      m.id = string_field(e, "id", file, "");
      if (!seen.insert(m.id).second) {
        fail(file, m.id, "duplicate error model id");
      }
      m.model.rho = number_field(e, "rho", file, m.id);
      m.model.mean_bias = number_or(e, "mean_bias", 0.0, file, m.id);
      m.model.sigma_base = number_field(e, "sigma_base", file, m.id);
      m.model.growth =
          parse_growth(string_field(e, "growth", file, m.id), file, m.id);
      m.model.slope_per_hour = number_or(e, "slope_per_hour", 0.0, file, m.id);
      m.model.rate_per_hour = number_or(e, "rate_per_hour", 0.0, file, m.id);
      m.model.modulation = number_or(e, "modulation", 0.0, file, m.id);
      m.model.period_hours = number_or(e, "period_hours", 24.0, file, m.id);
      if (!(m.model.rho >= 0.0 && m.model.rho < 1.0)) {
        fail(file, m.id, "rho must be in [0, 1)");
      }
      if (!(m.model.sigma_base >= 0.0)) {
        fail(file, m.id, "sigma_base must be >= 0");
      }
      cat.error_models.push_back(std::move(m));
    }
  }
  return cat;
}

}  // namespace hzn
