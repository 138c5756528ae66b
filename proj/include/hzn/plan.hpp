#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hzn/catalog.hpp"

namespace hzn {

/** One batch experiment: the cartesian lattice of datasets x batteries x
 * uncertainty factors x horizons x seeds, with shared MPC timing. A u.f.=0
 * reference sweep per (dataset, battery, seed) is always run in addition,
 * since the effective horizon is defined against the perfect-information
 * curve.
 */
struct ExperimentPlan {
  std::string id;
  std::vector<std::string> dataset_ids;
  std::vector<std::string> battery_ids;
  std::vector<double> uncertainty_factors;  // > 0 entries; 0 is implicit
  std::vector<int> horizons_h;              // strictly increasing, hours
  int stride_h = 3;
  int publication_interval_h = 3;
  int forecast_horizon_h = 72;
  std::string error_model_id = "linear_default";
  double epsilon = 1e-3;
  std::vector<std::uint64_t> seeds;
};

ExperimentPlan load_plan(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir;
  int jobs = 0;  // 0: hardware concurrency
  std::optional<std::uint64_t> seed_override;
  std::optional<double> epsilon_override;
  bool emit_plots = true;
};

struct PlanOutcome {
  int cells_total = 0;
  int cells_failed = 0;
  std::vector<std::string> failures;  // one line per failed cell
};

/** Executes the plan and writes, under out_dir:
 *   sweeps/<dataset>.csv   dataset_id,instance,battery_id,uf,horizon_h,revenue_eur
 *   summary.csv            dataset_id,instance,battery_id,uf,h_opt,h_eff,gap_h,
 *                          loss_pct,epsilon,seed
 *   manifest.json          config hash, seeds, versions, warning flags
 *   plots/                 plot-ready CSVs (unless disabled)
 *
 * Cells run in parallel (`jobs` workers) but every RNG stream is keyed by
 * (seed, dataset, uncertainty, issuance), so outputs are byte-identical for
 * any worker count. A failing cell is recorded and skipped, never fatal.
 */
PlanOutcome run_plan(const Catalogs& catalogs, const ExperimentPlan& plan,
                     const RunOptions& options);

/** Rebuilds plots/ from the sweeps and summary files in `run_dir`:
 *   plots/revenue_<dataset>_<battery>.csv   horizon + one column per u.f.
 *   plots/needle.csv                        battery_cycle_h,uf,h_opt,revenue_eur
 * `agg` is "median" or "mean" and controls cross-seed aggregation.
 */
void emit_plot_data(const std::filesystem::path& run_dir,
                    const Catalogs& catalogs, const std::string& agg = "median");

}  // namespace hzn
