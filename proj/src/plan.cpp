#include "hzn/plan.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "hzn/analysis.hpp"
#include "hzn/rng.hpp"

namespace hzn {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kToolVersion = "0.1.0";

[[noreturn]] void plan_fail(const std::filesystem::path& path,
                            const std::string& msg) {
  throw std::runtime_error("plan " + path.string() + ": " + msg);
}

std::vector<int> parse_horizons(const json& v,
                                const std::filesystem::path& path) {
  std::vector<int> out;
  if (v.is_array()) {
    for (const json& e : v) {
      if (!e.is_number_integer()) {
        plan_fail(path, "horizons_h must contain integers");
      }
      out.push_back(e.get<int>());
    }
  } else if (v.is_object()) {
    const int from = v.at("from").get<int>();
    const int to = v.at("to").get<int>();
    const int step = v.contains("step") ? v.at("step").get<int>() : 1;
    if (step < 1 || to < from) {
      plan_fail(path, "horizons_h range needs from <= to and step >= 1");
    }
    for (int h = from; h <= to; h += step) out.push_back(h);
  } else {
    plan_fail(path, "horizons_h must be an array or a {from,to,step} range");
  }
  if (out.empty()) plan_fail(path, "horizons_h is empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 1 || (i > 0 && out[i] <= out[i - 1])) {
      plan_fail(path, "horizons_h must be strictly increasing and >= 1");
    }
  }
  return out;
}

std::vector<std::string> string_list(const json& root, const char* key,
                                     const std::filesystem::path& path) {
  auto it = root.find(key);
  if (it == root.end() || !it->is_array() || it->empty()) {
    plan_fail(path, std::string("'") + key + "' must be a non-empty array");
  }
  std::vector<std::string> out;
  for (const json& e : *it) {
    if (!e.is_string()) {
      plan_fail(path, std::string("'") + key + "' must contain strings");
    }
    const std::string s = e.get<std::string>();
    if (std::find(out.begin(), out.end(), s) != out.end()) {
      plan_fail(path, std::string("duplicate entry '") + s + "' in " + key);
    }
    out.push_back(s);
  }
  return out;
}

/// Hours-to-steps conversion; rejects values that do not land on the grid.
int to_steps(double hours, double step_hours, const char* what) {
  const double q = hours / step_hours;
  const int s = static_cast<int>(std::llround(q));
  if (s < 1 || std::abs(q - s) > 1e-9) {
    std::ostringstream msg;
    msg << what << " (" << hours << " h) must be a positive multiple of the "
        << "dataset step (" << step_hours << " h)";
    throw std::runtime_error(msg.str());
  }
  return s;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string plan_config_hash(const ExperimentPlan& plan) {
  std::ostringstream os;
  os << plan.id;
  for (const auto& d : plan.dataset_ids) os << '|' << d;
  os << '#';
  for (const auto& b : plan.battery_ids) os << '|' << b;
  os << '#';
  for (double u : plan.uncertainty_factors) os << '|' << format_number(u);
  os << '#';
  for (int h : plan.horizons_h) os << '|' << h;
  os << '#' << plan.stride_h << '|' << plan.publication_interval_h << '|'
     << plan.forecast_horizon_h << '|' << plan.error_model_id << '|'
     << format_number(plan.epsilon);
  for (std::uint64_t s : plan.seeds) os << '|' << s;
  return hash_hex(fnv1a64(os.str()));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += ch;
    }
  }
  out.push_back(field);
  return out;
}

double aggregate(std::vector<double> values, const std::string& agg) {
  if (values.empty()) {
    throw std::runtime_error("aggregate: empty sample");
  }
  if (agg == "mean") {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
  if (agg != "median") {
    throw std::invalid_argument("aggregation must be 'median' or 'mean'");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2]
               : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open plan file: " + path.string());
  }
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    plan_fail(path, e.what());
  }

  ExperimentPlan plan;
  if (!root.contains("id") || !root.at("id").is_string()) {
    plan_fail(path, "'id' must be a string");
  }
  plan.id = root.at("id").get<std::string>();
  if (plan.id.empty()) plan_fail(path, "'id' is empty");
  plan.dataset_ids = string_list(root, "datasets", path);
  plan.battery_ids = string_list(root, "batteries", path);

  auto ufs = root.find("uncertainty_factors");
  if (ufs == root.end() || !ufs->is_array() || ufs->empty()) {
    plan_fail(path, "'uncertainty_factors' must be a non-empty array");
  }
  for (const json& e : *ufs) {
    if (!e.is_number() || !(e.get<double>() > 0.0)) {
      plan_fail(path,
                "uncertainty factors must be > 0 (the 0 reference is implicit)");
    }
    plan.uncertainty_factors.push_back(e.get<double>());
  }

  plan.horizons_h = parse_horizons(root.at("horizons_h"), path);
  plan.stride_h = root.value("stride_h", 3);
  plan.publication_interval_h = root.value("publication_interval_h", 3);
  plan.forecast_horizon_h = root.value("forecast_horizon_h", 72);
  if (plan.stride_h < 1 || plan.publication_interval_h < 1 ||
      plan.forecast_horizon_h < 1) {
    plan_fail(path, "stride, publication interval and forecast horizon must be >= 1");
  }
  plan.error_model_id = root.value("error_model", std::string("linear_default"));
  plan.epsilon = root.value("epsilon", 1e-3);
  if (!(plan.epsilon >= 0.0)) plan_fail(path, "epsilon must be >= 0");

  if (root.contains("seeds")) {
    const json& seeds = root.at("seeds");
    if (!seeds.is_array() || seeds.empty()) {
      plan_fail(path, "'seeds' must be a non-empty array");
    }
    for (const json& e : seeds) {
      if (!e.is_number_integer() || e.get<std::int64_t>() < 0) {
        plan_fail(path, "seeds must be non-negative integers");
      }
      plan.seeds.push_back(e.get<std::uint64_t>());
    }
  } else {
    plan.seeds = {1};
  }
  return plan;
}

PlanOutcome run_plan(const Catalogs& catalogs, const ExperimentPlan& plan,
                     const RunOptions& options) {
  namespace fs = std::filesystem;

  ExperimentPlan p = plan;
  if (options.seed_override) p.seeds = {*options.seed_override};
  if (options.epsilon_override) p.epsilon = *options.epsilon_override;

  const ErrorModel base_model = catalogs.error_model(p.error_model_id).model;

  // Resolve catalog entries up front so a bad id fails before any work.
  std::vector<const DatasetEntry*> datasets;
  for (const auto& id : p.dataset_ids) datasets.push_back(&catalogs.dataset(id));
  std::vector<const BatteryEntry*> batteries;
  for (const auto& id : p.battery_ids)
    batteries.push_back(&catalogs.battery(id));

  // Ground truths are fixed per dataset: the generation seed lives in the
  // catalog, not the plan, so every seed sees the same price path.
  struct DatasetContext {
    Series truth;
    std::vector<int> horizons_steps;
    int stride_steps = 0;
    int interval_steps = 0;
    int fh_steps = 0;
    std::string error;  // non-empty: all cells of this dataset fail
  };
  std::vector<DatasetContext> contexts(datasets.size());
  for (std::size_t di = 0; di < datasets.size(); ++di) {
    DatasetContext& ctx = contexts[di];
    try {
      const SignalSpec& sig = datasets[di]->signal;
      ctx.truth = compose_ground_truth(sig);
      for (int h : p.horizons_h) {
        ctx.horizons_steps.push_back(to_steps(h, sig.step_hours, "horizon"));
      }
      ctx.stride_steps = to_steps(p.stride_h, sig.step_hours, "stride");
      ctx.interval_steps =
          to_steps(p.publication_interval_h, sig.step_hours, "publication interval");
      ctx.fh_steps =
          to_steps(p.forecast_horizon_h, sig.step_hours, "forecast horizon");
      if (ctx.fh_steps < ctx.horizons_steps.back() + ctx.interval_steps - 1) {
        throw std::runtime_error(
            "forecast horizon too short for the largest planning horizon at "
            "this publication interval");
      }
    } catch (const std::exception& e) {
      ctx.error = e.what();
    }
  }

  // Cell lattice. Position 0 in the uncertainty list is the implicit
  // perfect-information reference every summary row points back to.
  std::vector<double> uf_list;
  uf_list.push_back(0.0);
  uf_list.insert(uf_list.end(), p.uncertainty_factors.begin(),
                 p.uncertainty_factors.end());

  const std::size_t ds_n = datasets.size();
  const std::size_t bat_n = batteries.size();
  const std::size_t seed_n = p.seeds.size();
  const std::size_t uf_n = uf_list.size();
  const std::size_t cell_n = ds_n * bat_n * seed_n * uf_n;
  auto cell_index = [&](std::size_t di, std::size_t bi, std::size_t si,
                        std::size_t ui) {
    return ((di * bat_n + bi) * seed_n + si) * uf_n + ui;
  };

  struct CellResult {
    bool ok = false;
    std::string error;
    HorizonCurve curve;
  };
  std::vector<CellResult> results(cell_n);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cell_n) return;
      const std::size_t ui = i % uf_n;
      const std::size_t si = (i / uf_n) % seed_n;
      const std::size_t bi = (i / (uf_n * seed_n)) % bat_n;
      const std::size_t di = i / (uf_n * seed_n * bat_n);
      CellResult& res = results[i];
      const DatasetContext& ctx = contexts[di];
      if (!ctx.error.empty()) {
        res.error = ctx.error;
        continue;
      }
      try {
        SweepSetup setup;
        setup.truth_spot = ctx.truth;
        setup.battery = batteries[bi]->spec;
        setup.market = MarketParams{};
        setup.model = base_model;
        setup.model.uncertainty_factor = uf_list[ui];
        setup.stride_steps = ctx.stride_steps;
        setup.interval_steps = ctx.interval_steps;
        setup.forecast_horizon_steps = ctx.fh_steps;
        setup.forecast_seed = seed_combine(
            seed_combine(p.seeds[si], fnv1a64(datasets[di]->id)),
            std::bit_cast<std::uint64_t>(uf_list[ui]));
        res.curve = sweep_horizons(setup, ctx.horizons_steps);
        res.ok = true;
      } catch (const std::exception& e) {
        res.error = e.what();
      }
    }
  };

  int jobs = options.jobs > 0
                 ? options.jobs
                 : static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  jobs = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(jobs), cell_n));
  {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  PlanOutcome outcome;
  outcome.cells_total = static_cast<int>(cell_n);
  for (std::size_t di = 0; di < ds_n; ++di) {
    for (std::size_t bi = 0; bi < bat_n; ++bi) {
      for (std::size_t si = 0; si < seed_n; ++si) {
        for (std::size_t ui = 0; ui < uf_n; ++ui) {
          const CellResult& r = results[cell_index(di, bi, si, ui)];
          if (r.ok) continue;
          ++outcome.cells_failed;
          std::ostringstream line;
          line << datasets[di]->id << '/' << batteries[bi]->id << "/uf="
               << format_number(uf_list[ui]) << "/seed=" << p.seeds[si] << ": "
               << r.error;
          outcome.failures.push_back(line.str());
        }
      }
    }
  }

  // Output assembly happens on one thread in plan order, so reruns are
  // byte-identical regardless of worker count.
  const fs::path out = options.out_dir;
  fs::create_directories(out / "sweeps");

  for (std::size_t di = 0; di < ds_n; ++di) {
    const fs::path path = out / "sweeps" / (datasets[di]->id + ".csv");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "dataset_id,instance,battery_id,uf,horizon_h,revenue_eur\n";
    for (std::size_t bi = 0; bi < bat_n; ++bi) {
      for (std::size_t si = 0; si < seed_n; ++si) {
        for (std::size_t ui = 0; ui < uf_n; ++ui) {
          const CellResult& r = results[cell_index(di, bi, si, ui)];
          if (!r.ok) continue;
          for (std::size_t k = 0; k < r.curve.horizons_h.size(); ++k) {
            f << datasets[di]->id << ',' << datasets[di]->instance << ','
              << batteries[bi]->id << ',' << format_number(uf_list[ui]) << ','
              << format_number(r.curve.horizons_h[k]) << ','
              << format_number(r.curve.revenues_eur[k]) << '\n';
          }
        }
      }
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
  }

  {
    const fs::path path = out / "summary.csv";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "dataset_id,instance,battery_id,uf,h_opt,h_eff,gap_h,loss_pct,"
         "epsilon,seed\n";
    for (std::size_t di = 0; di < ds_n; ++di) {
      for (std::size_t bi = 0; bi < bat_n; ++bi) {
        for (std::size_t si = 0; si < seed_n; ++si) {
          const CellResult& ref = results[cell_index(di, bi, si, 0)];
          for (std::size_t ui = 1; ui < uf_n; ++ui) {
            const CellResult& r = results[cell_index(di, bi, si, ui)];
            if (!r.ok || !ref.ok) continue;
            const SweepResult sr =
                analyze_curve(r.curve, ref.curve, p.epsilon);
            f << datasets[di]->id << ',' << datasets[di]->instance << ','
              << batteries[bi]->id << ',' << format_number(uf_list[ui]) << ','
              << format_number(sr.h_opt) << ',' << format_number(sr.h_eff)
              << ',' << format_number(sr.gap_h) << ','
              << (sr.loss_pct ? format_number(*sr.loss_pct) : std::string())
              << ',' << format_number(sr.epsilon) << ',' << p.seeds[si]
              << '\n';
          }
        }
      }
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
  }

  {
    ordered_json manifest;
    manifest["plan_id"] = p.id;
    manifest["tool"] = std::string("horizonlab ") + kToolVersion;
    manifest["config_hash"] = plan_config_hash(p);
    manifest["datasets"] = p.dataset_ids;
    manifest["batteries"] = p.battery_ids;
    manifest["uncertainty_factors"] = p.uncertainty_factors;
    manifest["horizons_h"] = p.horizons_h;
    manifest["stride_h"] = p.stride_h;
    manifest["publication_interval_h"] = p.publication_interval_h;
    manifest["forecast_horizon_h"] = p.forecast_horizon_h;
    manifest["error_model"] = p.error_model_id;
    manifest["epsilon"] = p.epsilon;
    manifest["seeds"] = p.seeds;
    manifest["cells_total"] = outcome.cells_total;
    manifest["cells_failed"] = outcome.cells_failed;
    manifest["failures"] = outcome.failures;
    const fs::path path = out / "manifest.json";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << manifest.dump(2) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path.string());
  }

  if (options.emit_plots) {
    emit_plot_data(out, catalogs, "median");
  }
  return outcome;
}

void emit_plot_data(const std::filesystem::path& run_dir,
                    const Catalogs& catalogs, const std::string& agg) {
  namespace fs = std::filesystem;
  const fs::path sweeps_dir = run_dir / "sweeps";
  if (!fs::is_directory(sweeps_dir)) {
    throw std::runtime_error("no sweeps directory under " + run_dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(sweeps_dir)) {
    if (e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw std::runtime_error("no sweep files under " + sweeps_dir.string());
  }

  // dataset -> battery -> uf -> horizon -> samples (one per seed row)
  using Curve = std::map<double, std::vector<double>>;
  std::map<std::string, std::map<std::string, std::map<double, Curve>>> by_file;
  // battery -> uf -> horizon -> samples pooled across datasets and seeds
  std::map<std::string, std::map<double, Curve>> pooled;

  for (const fs::path& file : files) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line)) {
      throw std::runtime_error("empty sweep file: " + file.string());
    }
    if (split_csv(line) !=
        std::vector<std::string>{"dataset_id", "instance", "battery_id", "uf",
                                 "horizon_h", "revenue_eur"}) {
      throw std::runtime_error("unexpected header in " + file.string());
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto fields = split_csv(line);
      if (fields.size() != 6) {
        throw std::runtime_error("malformed row in " + file.string());
      }
      const std::string& dataset = fields[0];
      const std::string& battery = fields[2];
      const double uf = std::stod(fields[3]);
      const double horizon = std::stod(fields[4]);
      const double revenue = std::stod(fields[5]);
      by_file[dataset][battery][uf][horizon].push_back(revenue);
      pooled[battery][uf][horizon].push_back(revenue);
    }
  }

  const fs::path plots = run_dir / "plots";
  fs::create_directories(plots);

  for (const auto& [dataset, per_battery] : by_file) {
    for (const auto& [battery, per_uf] : per_battery) {
      const fs::path path =
          plots / ("revenue_" + dataset + "_" + battery + ".csv");
      std::ofstream f(path);
      if (!f) throw std::runtime_error("cannot write " + path.string());
      f << "horizon_h";
      for (const auto& [uf, curve] : per_uf) {
        f << ",uf_" << format_number(uf);
      }
      f << '\n';
      std::map<double, bool> horizons;
      for (const auto& [uf, curve] : per_uf) {
        for (const auto& [h, samples] : curve) horizons[h] = true;
      }
      for (const auto& [h, unused] : horizons) {
        f << format_number(h);
        for (const auto& [uf, curve] : per_uf) {
          auto it = curve.find(h);
          f << ',';
          if (it != curve.end()) f << format_number(aggregate(it->second, agg));
        }
        f << '\n';
      }
      if (!f) throw std::runtime_error("write failed: " + path.string());
    }
  }

  {
    // Optimal horizon against battery cycle duration, one row per
    // (battery, uncertainty), aggregated over datasets and seeds.
    struct NeedleRow {
      double duration = 0.0;
      std::string battery;
      double uf = 0.0;
      double h_opt = 0.0;
      double revenue = 0.0;
    };
    std::vector<NeedleRow> rows;
    for (const auto& [battery, per_uf] : pooled) {
      const double duration = catalogs.battery(battery).duration_h;
      for (const auto& [uf, curve] : per_uf) {
        NeedleRow row;
        row.duration = duration;
        row.battery = battery;
        row.uf = uf;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& [h, samples] : curve) {
          const double v = aggregate(samples, agg);
          if (v > best) {
            best = v;
            row.h_opt = h;
          }
        }
        row.revenue = best;
        rows.push_back(row);
      }
    }
    std::sort(rows.begin(), rows.end(), [](const NeedleRow& a, const NeedleRow& b) {
      if (a.duration != b.duration) return a.duration < b.duration;
      if (a.battery != b.battery) return a.battery < b.battery;
      return a.uf < b.uf;
    });
    const fs::path path = plots / "needle.csv";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "battery_cycle_h,uf,h_opt,revenue_eur\n";
    for (const NeedleRow& row : rows) {
      f << format_number(row.duration) << ',' << format_number(row.uf) << ','
        << format_number(row.h_opt) << ',' << format_number(row.revenue)
        << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace hzn
