#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hzn/analysis.hpp"
#include "hzn/catalog.hpp"
#include "hzn/plan.hpp"
#include "hzn/rng.hpp"

namespace fs = std::filesystem;

namespace {

fs::path default_out_root() {
  if (const char* env = std::getenv("HORIZONLAB_OUT")) {
    return fs::path(env);
  }
  return fs::path("out");
}

int hours_to_steps(double hours, double step_hours, const char* what) {
  const double q = hours / step_hours;
  const int s = static_cast<int>(std::llround(q));
  if (s < 1 || std::abs(q - s) > 1e-9) {
    throw std::runtime_error(std::string(what) +
                             " must be a positive multiple of the dataset step");
  }
  return s;
}

struct GenerateArgs {
  std::string catalogs = "catalogs";
  std::vector<std::string> datasets;  // empty: all
  std::string out;
  bool forecasts = false;
  std::string error_model = "linear_default";
  double uf = 1.0;
  double interval_h = 3.0;
  double horizon_h = 72.0;
  std::uint64_t seed = 1;
};

int cmd_generate(const GenerateArgs& a) {
  const hzn::Catalogs cat = hzn::load_catalogs(a.catalogs);
  std::vector<std::string> ids = a.datasets;
  if (ids.empty()) {
    for (const auto& d : cat.datasets) ids.push_back(d.id);
  }
  const fs::path out =
      a.out.empty() ? default_out_root() / "datasets" : fs::path(a.out);
  fs::create_directories(out);
  for (const std::string& id : ids) {
    const hzn::DatasetEntry& entry = cat.dataset(id);
    const hzn::Series truth = hzn::compose_ground_truth(entry.signal);
    const fs::path truth_path = out / ("truth_" + id + ".csv");
    hzn::write_series_csv(truth, truth_path);
    std::cout << "wrote " << truth_path.string() << " (" << truth.size()
              << " steps)\n";
    if (a.forecasts) {
      hzn::ErrorModel model = cat.error_model(a.error_model).model;
      model.uncertainty_factor = a.uf;
      const int interval =
          hours_to_steps(a.interval_h, truth.step_hours, "publication interval");
      const int horizon =
          hours_to_steps(a.horizon_h, truth.step_hours, "forecast horizon");
      const hzn::ForecastSet fset = hzn::issue_forecasts(
          truth, model, interval, horizon,
          hzn::seed_combine(a.seed, hzn::fnv1a64(id)));
      const fs::path fc_path = out / ("forecasts_" + id + ".csv");
      hzn::write_forecasts_csv(fset, fc_path);
      std::cout << "wrote " << fc_path.string() << " ("
                << fset.forecasts.size() << " issuances)\n";
    }
  }
  return 0;
}

struct SweepArgs {
  std::string catalogs = "catalogs";
  std::string plan;
  std::string out;
  int jobs = 0;
  bool no_plots = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
};

int cmd_sweep(const SweepArgs& a) {
  const hzn::Catalogs cat = hzn::load_catalogs(a.catalogs);
  const hzn::ExperimentPlan plan = hzn::load_plan(a.plan);
  hzn::RunOptions opt;
  opt.out_dir = a.out.empty() ? default_out_root() / plan.id : fs::path(a.out);
  opt.jobs = a.jobs;
  opt.seed_override = a.seed;
  opt.epsilon_override = a.epsilon;
  opt.emit_plots = !a.no_plots;
  const hzn::PlanOutcome outcome = hzn::run_plan(cat, plan, opt);
  std::cout << "plan " << plan.id << ": "
            << outcome.cells_total - outcome.cells_failed << "/"
            << outcome.cells_total << " cells ok, results under "
            << opt.out_dir.string() << "\n";
  for (const std::string& line : outcome.failures) {
    std::cerr << "failed: " << line << "\n";
  }
  return outcome.cells_failed == outcome.cells_total ? 1 : 0;
}

struct ReportArgs {
  std::string catalogs = "catalogs";
  std::string run;
  std::string agg = "median";
};

int cmd_report(const ReportArgs& a) {
  const hzn::Catalogs cat = hzn::load_catalogs(a.catalogs);
  hzn::emit_plot_data(a.run, cat, a.agg);
  std::cout << "plots rebuilt under " << (fs::path(a.run) / "plots").string()
            << "\n";
  return 0;
}

struct ValidateArgs {
  std::string catalogs = "catalogs";
  std::string plan;
};

int cmd_validate(const ValidateArgs& a) {
  int problems = 0;
  const hzn::Catalogs cat = hzn::load_catalogs(a.catalogs);
  for (const auto& d : cat.datasets) {
    try {
      const hzn::Series s = hzn::compose_ground_truth(d.signal);
      const double proxy = hzn::revenue_proxy(s);
      std::cout << "dataset " << d.id << ": " << s.size()
                << " steps, revenue proxy " << hzn::format_number(proxy)
                << " EUR/MWh/day\n";
    } catch (const std::exception& e) {
      std::cerr << "dataset " << d.id << ": " << e.what() << "\n";
      ++problems;
    }
  }
  std::cout << cat.datasets.size() << " datasets, " << cat.batteries.size()
            << " batteries, " << cat.error_models.size() << " error models\n";
  if (!a.plan.empty()) {
    const hzn::ExperimentPlan plan = hzn::load_plan(a.plan);
    try {
      for (const auto& id : plan.dataset_ids) cat.dataset(id);
      for (const auto& id : plan.battery_ids) cat.battery(id);
      cat.error_model(plan.error_model_id);
      std::cout << "plan " << plan.id << ": "
                << plan.dataset_ids.size() * plan.battery_ids.size() *
                       plan.uncertainty_factors.size() * plan.seeds.size()
                << " cells (+ references)\n";
    } catch (const std::exception& e) {
      std::cerr << "plan " << plan.id << ": " << e.what() << "\n";
      ++problems;
    }
  }
  return problems ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "horizonlab: planning-horizon experiments for battery dispatch on "
      "synthetic price series"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "horizonlab 0.1.0");

  GenerateArgs gen;
  CLI::App* generate =
      app.add_subcommand("generate", "write ground-truth (and forecast) series");
  generate->add_option("--catalogs", gen.catalogs, "catalog directory")
      ->capture_default_str();
  generate->add_option("--dataset", gen.datasets,
                       "dataset ids (default: all in the catalog)");
  generate->add_option("--out", gen.out, "output directory");
  generate->add_flag("--forecasts", gen.forecasts,
                     "also write a forecast set per dataset");
  generate->add_option("--error-model", gen.error_model, "error model id")
      ->capture_default_str();
  generate->add_option("--uf", gen.uf, "uncertainty factor for forecasts")
      ->capture_default_str();
  generate->add_option("--interval-h", gen.interval_h,
                       "forecast publication interval, hours")
      ->capture_default_str();
  generate->add_option("--horizon-h", gen.horizon_h,
                       "forecast horizon, hours")
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "forecast seed")
      ->capture_default_str();

  SweepArgs sw;
  CLI::App* sweep =
      app.add_subcommand("sweep", "run an experiment plan over horizons");
  sweep->add_option("--catalogs", sw.catalogs, "catalog directory")
      ->capture_default_str();
  sweep->add_option("--plan", sw.plan, "plan json file")->required();
  sweep->add_option("--out", sw.out,
                    "run directory (default: $HORIZONLAB_OUT/<plan id>)");
  sweep->add_option("--jobs", sw.jobs, "worker threads (0: all cores)")
      ->capture_default_str();
  sweep->add_flag("--no-plots", sw.no_plots, "skip plot-ready csv emission");
  std::uint64_t seed_val = 0;
  CLI::Option* seed_opt =
      sweep->add_option("--seed", seed_val, "replace the plan's seed list");
  double eps_val = 0.0;
  CLI::Option* eps_opt =
      sweep->add_option("--epsilon", eps_val, "override the plan's epsilon");

  ReportArgs rep;
  CLI::App* report =
      app.add_subcommand("report", "rebuild plot csvs from a finished run");
  report->add_option("--catalogs", rep.catalogs, "catalog directory")
      ->capture_default_str();
  report->add_option("--run", rep.run, "run directory")->required();
  report->add_option("--agg", rep.agg, "cross-seed aggregation: median or mean")
      ->capture_default_str();

  ValidateArgs val;
  CLI::App* validate =
      app.add_subcommand("validate", "check catalogs (and optionally a plan)");
  validate->add_option("--catalogs", val.catalogs, "catalog directory")
      ->capture_default_str();
  validate->add_option("--plan", val.plan, "plan json file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (sweep->parsed()) {
      if (*seed_opt) sw.seed = seed_val;
      if (*eps_opt) sw.epsilon = eps_val;
      return cmd_sweep(sw);
    }
    if (report->parsed()) return cmd_report(rep);
    if (validate->parsed()) return cmd_validate(val);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
