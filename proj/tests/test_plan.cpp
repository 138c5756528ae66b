#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hzn/catalog.hpp"
#include "hzn/plan.hpp"

namespace fs = std::filesystem;

namespace {

fs::path repo_root() { return fs::path(HZN_REPO_DIR); }

struct TempDir {
  fs::path dir;
  explicit TempDir(const std::string& tag) {
    dir = fs::temp_directory_path() /
          ("hzn_plan_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

hzn::ExperimentPlan tiny_plan() {
  hzn::ExperimentPlan p;
  p.id = "tiny";
  p.dataset_ids = {"sine_undistorted"};
  p.battery_ids = {"01h_lithium"};
  p.uncertainty_factors = {1.0};
  p.horizons_h = {1, 2, 3, 4, 5, 6};
  p.forecast_horizon_h = 12;
  p.seeds = {1};
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(HZN_CLI_BIN) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("the checked-in desk plan parses with its ranges expanded") {
  const hzn::ExperimentPlan p =
      hzn::load_plan(repo_root() / "catalogs" / "plans" / "desk_sine.json");
  CHECK(p.id == "desk_sine");
  CHECK(p.dataset_ids == std::vector<std::string>{"sine_undistorted"});
  CHECK(p.battery_ids.size() == 6);
  CHECK(p.uncertainty_factors == std::vector<double>{0.1, 1, 3, 6, 10});
  REQUIRE(p.horizons_h.size() == 45);
  CHECK(p.horizons_h.front() == 1);
  CHECK(p.horizons_h.back() == 45);
  CHECK(p.stride_h == 3);
  CHECK(p.publication_interval_h == 3);
  CHECK(p.forecast_horizon_h == 72);
  CHECK(p.error_model_id == "linear_default");
  CHECK(p.epsilon == 0.001);
  CHECK(p.seeds == std::vector<std::uint64_t>{1});
}

TEST_CASE("plan parsing: defaults and rejections") {
  TempDir scratch("load");
  auto write_plan = [&](const std::string& text) {
    const fs::path p = scratch.dir / "plan.json";
    std::ofstream(p) << text;
    return p;
  };

  SUBCASE("minimal plan fills the documented defaults") {
    const hzn::ExperimentPlan p = hzn::load_plan(write_plan(R"({
      "id": "m", "datasets": ["a"], "batteries": ["b"],
      "uncertainty_factors": [2], "horizons_h": [4, 8]
    })"));
    CHECK(p.stride_h == 3);
    CHECK(p.publication_interval_h == 3);
    CHECK(p.forecast_horizon_h == 72);
    CHECK(p.error_model_id == "linear_default");
    CHECK(p.epsilon == 1e-3);
    CHECK(p.seeds == std::vector<std::uint64_t>{1});
  }
  SUBCASE("horizon ranges honour their step") {
    const hzn::ExperimentPlan p = hzn::load_plan(write_plan(R"({
      "id": "m", "datasets": ["a"], "batteries": ["b"],
      "uncertainty_factors": [2],
      "horizons_h": {"from": 2, "to": 10, "step": 4}
    })"));
    CHECK(p.horizons_h == std::vector<int>{2, 6, 10});
  }
  SUBCASE("missing id") {
    CHECK_THROWS(hzn::load_plan(write_plan(
        R"({"datasets": ["a"], "batteries": ["b"],
            "uncertainty_factors": [1], "horizons_h": [1]})")));
  }
  SUBCASE("zero uncertainty factor is reserved for the implicit reference") {
    CHECK_THROWS(hzn::load_plan(write_plan(
        R"({"id": "m", "datasets": ["a"], "batteries": ["b"],
            "uncertainty_factors": [0], "horizons_h": [1]})")));
  }
  SUBCASE("horizons must increase") {
    CHECK_THROWS(hzn::load_plan(write_plan(
        R"({"id": "m", "datasets": ["a"], "batteries": ["b"],
            "uncertainty_factors": [1], "horizons_h": [3, 2]})")));
  }
  SUBCASE("inverted range") {
    CHECK_THROWS(hzn::load_plan(write_plan(
        R"({"id": "m", "datasets": ["a"], "batteries": ["b"],
            "uncertainty_factors": [1],
            "horizons_h": {"from": 5, "to": 2}})")));
  }
  SUBCASE("empty battery list") {
    CHECK_THROWS(hzn::load_plan(write_plan(
        R"({"id": "m", "datasets": ["a"], "batteries": [],
            "uncertainty_factors": [1], "horizons_h": [1]})")));
  }
  SUBCASE("nonexistent file") {
    CHECK_THROWS(hzn::load_plan(scratch.dir / "missing.json"));
  }
}

TEST_CASE("a small plan runs end to end and reruns byte-identically") {
  const hzn::Catalogs cat = hzn::load_catalogs(repo_root() / "catalogs");
  const hzn::ExperimentPlan plan = tiny_plan();

  TempDir a("run_a");
  hzn::RunOptions opts_a;
  opts_a.out_dir = a.dir;
  opts_a.jobs = 1;
  const hzn::PlanOutcome out_a = hzn::run_plan(cat, plan, opts_a);
  CHECK(out_a.cells_total == 2);  // u.f. 1 plus the implicit 0 reference
  CHECK(out_a.cells_failed == 0);
  CHECK(out_a.failures.empty());

  const std::string sweep = read_file(a.dir / "sweeps" / "sine_undistorted.csv");
  CHECK(line_count(sweep) == 1 + 2 * 6);  // header + 2 factors x 6 horizons
  CHECK(sweep.rfind("dataset_id,instance,battery_id,uf,horizon_h,revenue_eur\n",
                    0) == 0);
  CHECK(sweep.find("\nsine_undistorted,undistorted,01h_lithium,0,1,") !=
        std::string::npos);
  CHECK(sweep.find("\nsine_undistorted,undistorted,01h_lithium,1,6,") !=
        std::string::npos);

  const std::string summary = read_file(a.dir / "summary.csv");
  CHECK(line_count(summary) == 2);  // header + the single u.f. > 0 row
  CHECK(summary.find("dataset_id,instance,battery_id,uf,h_opt,h_eff,gap_h,"
                     "loss_pct,epsilon,seed\n") == 0);
  CHECK(summary.find("\nsine_undistorted,undistorted,01h_lithium,1,") !=
        std::string::npos);
  CHECK(summary.find(",0.001,1\n") != std::string::npos);

  const nlohmann::json manifest =
      nlohmann::json::parse(read_file(a.dir / "manifest.json"));
  CHECK(manifest.at("plan_id") == "tiny");
  CHECK(manifest.at("cells_total") == 2);
  CHECK(manifest.at("cells_failed") == 0);
  CHECK(!manifest.at("config_hash").get<std::string>().empty());

  const std::string revenue =
      read_file(a.dir / "plots" / "revenue_sine_undistorted_01h_lithium.csv");
  CHECK(revenue.rfind("horizon_h,uf_0,uf_1\n", 0) == 0);
  CHECK(line_count(revenue) == 1 + 6);
  const std::string needle = read_file(a.dir / "plots" / "needle.csv");
  CHECK(needle.rfind("battery_cycle_h,uf,h_opt,revenue_eur\n", 0) == 0);
  CHECK(line_count(needle) == 1 + 2);
  CHECK(needle.find("\n1,0,") != std::string::npos);  // 1 h battery, u.f. 0

  // Same plan, two workers: scheduling must not leak into the files.
  TempDir b("run_b");
  hzn::RunOptions opts_b;
  opts_b.out_dir = b.dir;
  opts_b.jobs = 2;
  const hzn::PlanOutcome out_b = hzn::run_plan(cat, plan, opts_b);
  CHECK(out_b.cells_failed == 0);
  for (const char* rel : {"sweeps/sine_undistorted.csv", "summary.csv",
                          "manifest.json",
                          "plots/revenue_sine_undistorted_01h_lithium.csv",
                          "plots/needle.csv"}) {
    INFO("file ", rel);
    CHECK(read_file(a.dir / rel) == read_file(b.dir / rel));
  }
}

TEST_CASE("seed and epsilon overrides land in the summary") {
  const hzn::Catalogs cat = hzn::load_catalogs(repo_root() / "catalogs");
  hzn::ExperimentPlan plan = tiny_plan();
  plan.horizons_h = {1, 2, 3};

  TempDir t("override");
  hzn::RunOptions opts;
  opts.out_dir = t.dir;
  opts.jobs = 1;
  opts.seed_override = 5;
  opts.epsilon_override = 0.25;
  opts.emit_plots = false;
  const hzn::PlanOutcome out = hzn::run_plan(cat, plan, opts);
  CHECK(out.cells_failed == 0);
  const std::string summary = read_file(t.dir / "summary.csv");
  CHECK(summary.find(",0.25,5\n") != std::string::npos);
  CHECK(!fs::exists(t.dir / "plots"));
}

TEST_CASE("infeasible configuration fails every cell but still writes a run") {
  const hzn::Catalogs cat = hzn::load_catalogs(repo_root() / "catalogs");
  hzn::ExperimentPlan plan = tiny_plan();
  plan.forecast_horizon_h = 6;  // < max horizon + interval - 1

  TempDir t("failing");
  hzn::RunOptions opts;
  opts.out_dir = t.dir;
  opts.jobs = 1;
  const hzn::PlanOutcome out = hzn::run_plan(cat, plan, opts);
  CHECK(out.cells_total == 2);
  CHECK(out.cells_failed == 2);
  REQUIRE(out.failures.size() == 2);
  CHECK(out.failures[0].find("sine_undistorted/01h_lithium") !=
        std::string::npos);
  CHECK(out.failures[0].find("forecast horizon") != std::string::npos);

  CHECK(line_count(read_file(t.dir / "sweeps" / "sine_undistorted.csv")) == 1);
  CHECK(line_count(read_file(t.dir / "summary.csv")) == 1);
  const nlohmann::json manifest =
      nlohmann::json::parse(read_file(t.dir / "manifest.json"));
  CHECK(manifest.at("cells_failed") == 2);
  CHECK(manifest.at("failures").size() == 2);
}

TEST_CASE("plot data can be rebuilt from the run directory") {
  const hzn::Catalogs cat = hzn::load_catalogs(repo_root() / "catalogs");
  hzn::ExperimentPlan plan = tiny_plan();
  plan.horizons_h = {1, 2, 3};

  TempDir t("replot");
  hzn::RunOptions opts;
  opts.out_dir = t.dir;
  opts.jobs = 1;
  REQUIRE(hzn::run_plan(cat, plan, opts).cells_failed == 0);

  const std::string before =
      read_file(t.dir / "plots" / "revenue_sine_undistorted_01h_lithium.csv");
  fs::remove_all(t.dir / "plots");
  hzn::emit_plot_data(t.dir, cat, "median");
  CHECK(read_file(t.dir / "plots" /
                  "revenue_sine_undistorted_01h_lithium.csv") == before);

  // With one seed, the mean and the median coincide.
  hzn::emit_plot_data(t.dir, cat, "mean");
  CHECK(read_file(t.dir / "plots" /
                  "revenue_sine_undistorted_01h_lithium.csv") == before);

  CHECK_THROWS(hzn::emit_plot_data(t.dir, cat, "p50"));
  CHECK_THROWS(hzn::emit_plot_data(t.dir / "nowhere", cat, "median"));
}

TEST_CASE("command line round trip") {
  TempDir t("cli");
  const fs::path plan_path = t.dir / "tiny.json";
  std::ofstream(plan_path) << R"({
    "id": "tiny_cli",
    "datasets": ["sine_undistorted"],
    "batteries": ["01h_lithium"],
    "uncertainty_factors": [1],
    "horizons_h": [1, 2, 3],
    "forecast_horizon_h": 12,
    "seeds": [1]
  })";
  const std::string catalogs = (repo_root() / "catalogs").string();
  const fs::path run_dir = t.dir / "run";

  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("validate --catalogs " + catalogs) == 0);
  CHECK(run_cli("sweep --plan " + plan_path.string() + " --catalogs " +
                catalogs + " --out " + run_dir.string() + " --jobs 1") == 0);
  CHECK(fs::exists(run_dir / "summary.csv"));
  CHECK(fs::exists(run_dir / "manifest.json"));
  CHECK(run_cli("report --catalogs " + catalogs + " --run " +
                run_dir.string() + " --agg mean") == 0);
  CHECK(run_cli("report --catalogs " + catalogs + " --run " +
                run_dir.string() + " --agg bogus") == 1);
  CHECK(run_cli("sweep --catalogs " + catalogs + " --plan " +
                (t.dir / "absent.json").string()) == 1);
}
