#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hzn/series.hpp"

namespace hzn {

struct BatterySpec {
  double capacity_mwh = 0.0;        // C > 0
  double charge_power_mw = 0.0;     // Pc > 0
  double discharge_power_mw = 0.0;  // Pd > 0
  double efficiency = 1.0;          // eta in (0, 1]
  double soc_initial_mwh = 0.0;     // in [0, C]

  void validate() const;  // throws std::invalid_argument
};

/** Retail price split applied to the spot series, plus grid connection caps.
 * Caps <= 0 mean "use max(charge, discharge) power of the battery at hand".
 */
struct MarketParams {
  double buy_multiplier = 1.2;
  double buy_offset_eur = 0.07;
  double sell_multiplier = 1.0;
  double sell_offset_eur = -0.01;
  double grid_in_cap_mw = 0.0;
  double grid_out_cap_mw = 0.0;

  double grid_in_cap(const BatterySpec& b) const;
  double grid_out_cap(const BatterySpec& b) const;
};

/// (buy, sell) series: buy = 1.2 * spot + 0.07, sell = spot - 0.01 by default.
std::pair<Series, Series> split_prices(const Series& spot, const MarketParams& m);

/** One scheduled step. Powers in MW, SoC in MWh at the end of the step.
 * `charging` and `importing` are the resolved exclusivity binaries: charging
 * blocks discharge, importing blocks export, each pair mutually exclusive.
 */
struct ScheduleStep {
  double charge_mw = 0.0;
  double discharge_mw = 0.0;
  double soc_mwh = 0.0;
  double grid_in_mw = 0.0;
  double grid_out_mw = 0.0;
  bool charging = false;
  bool importing = false;
};

struct Schedule {
  std::vector<ScheduleStep> steps;
  double objective_eur = 0.0;  // sum over steps of (sell*out - buy*in) * dt
  double step_hours = 1.0;
  double soc_start_mwh = 0.0;
};

struct SolveStats {
  int nodes = 0;            // branch-and-bound nodes solved (1 = root only)
  int lp_iterations = 0;    // simplex iterations across all nodes
  bool relaxation_integral = false;  // root already satisfied exclusivity
  double relaxation_objective = 0.0;
};

/// Raw root-relaxation solution (exclusivity binaries relaxed), no cleanup.
struct RelaxedSolution {
  std::vector<double> charge_mw, discharge_mw, soc_mwh, grid_in_mw, grid_out_mw;
  double objective_eur = 0.0;
  bool complementary = false;  // true when no exclusive pair is jointly active
};

/** Solves the LP relaxation of the dispatch window. With the binaries
 * projected out, relaxed exclusivity reads c/Pc + d/Pd <= 1 and
 * g_in/Gin + g_out/Gout <= 1 per step, which admits exactly the same
 * (c, d, g) solutions and objective as relaxing z, y to [0, 1].
 */
RelaxedSolution lp_relaxation_solve(const Series& buy, const Series& sell,
                                    const BatterySpec& battery,
                                    const MarketParams& market,
                                    double soc_start_mwh);

/** Optimal dispatch over one price window: maximizes
 * sum_t (sell_t * g_out_t - buy_t * g_in_t) * dt subject to the grid balance
 * g_in + d = g_out + c, SoC dynamics s_t = s_{t-1} + (eta*c_t - d_t) * dt,
 * power/SoC/grid bounds and both exclusivity pairs. No terminal SoC
 * constraint. LP relaxation plus best-bound branch-and-bound on the
 * exclusivity binaries; windows whose relaxation mixes charge and discharge
 * on many steps at once (deeply negative prices do that) are finished by an
 * exact dynamic program over the reachable SoC lattice instead, because
 * branching degenerates there. Either way the returned schedule is feasible
 * to 1e-9 and its objective is optimal to well under 1e-6 EUR.
 */
Schedule solve_window(const Series& buy, const Series& sell,
                      const BatterySpec& battery, const MarketParams& market,
                      double soc_start_mwh, SolveStats* stats = nullptr);

/// Writes `t,charge_mw,discharge_mw,soc_mwh,grid_in_mw,grid_out_mw` rows.
void write_schedule_csv(const Schedule& s, const std::filesystem::path& path);

/// LP-format-style text dump of the window model, for debugging.
std::string dump_window_model(const Series& buy, const Series& sell,
                              const BatterySpec& battery,
                              const MarketParams& market, double soc_start_mwh);

}  // namespace hzn
