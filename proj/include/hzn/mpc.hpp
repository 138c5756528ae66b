#pragma once

#include <vector>

#include "hzn/forecast.hpp"
#include "hzn/milp.hpp"
#include "hzn/series.hpp"

namespace hzn {

/** Rolling-horizon controller settings, in steps of the study series.
 * If the horizon is shorter than the stride, each plan is committed in full
 * and the controller replans as soon as it runs out; the committed schedule
 * always tiles the study window exactly.
 */
struct MpcConfig {
  int horizon_steps = 1;  // H >= 1
  int stride_steps = 1;   // commit block >= 1
};

struct MpcRun {
  Schedule committed;                        // one step per study step
  double realized_revenue_eur = 0.0;         // committed flows at truth prices
  std::vector<double> window_objectives;     // forecast-priced, per plan
  std::vector<double> block_realized_eur;    // truth-priced, per commit block
};

/** Runs the controller across the whole study window: at every commit
 * boundary it takes the latest published forecast, optimizes the next
 * min(H, remaining) steps from the carried SoC, commits up to a stride of
 * planned actions and rolls forward. The final window is truncated at the
 * study end; nothing beyond the series is ever fabricated.
 */
MpcRun run_mpc(const Series& truth_spot, const ForecastSet& forecasts,
               const BatterySpec& battery, const MarketParams& market,
               const MpcConfig& config);

/// Revenue of a committed schedule at ground-truth prices. The schedule must
/// cover exactly one step per truth sample.
double realized_revenue(const Schedule& committed, const Series& truth_spot,
                        const MarketParams& market);

}  // namespace hzn
