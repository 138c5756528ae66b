#include "hzn/mpc.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace hzn {

double realized_revenue(const Schedule& committed, const Series& truth_spot,
                        const MarketParams& market) {
  if (committed.steps.size() > truth_spot.size()) {
    throw std::invalid_argument(
        "realized_revenue: schedule longer than the price series");
  }
  const auto prices = split_prices(truth_spot, market);
  double total = 0.0;
  for (std::size_t t = 0; t < committed.steps.size(); ++t) {
    const ScheduleStep& st = committed.steps[t];
    total += (prices.second.values[t] * st.grid_out_mw -
              prices.first.values[t] * st.grid_in_mw) *
             committed.step_hours;
  }
  return total;
}

MpcRun run_mpc(const Series& truth_spot, const ForecastSet& forecasts,
               const BatterySpec& battery, const MarketParams& market,
               const MpcConfig& config) {
  battery.validate();
  if (config.horizon_steps < 1 || config.stride_steps < 1) {
    throw std::invalid_argument("run_mpc: horizon and stride must be >= 1");
  }
  if (truth_spot.empty()) {
    throw std::invalid_argument("run_mpc: empty price series");
  }
  if (forecasts.step_hours != truth_spot.step_hours) {
    throw std::invalid_argument("run_mpc: forecast/truth step mismatch");
  }

  const auto truth_prices = split_prices(truth_spot, market);
  const std::size_t n = truth_spot.size();

  MpcRun run;
  run.committed.step_hours = truth_spot.step_hours;
  run.committed.soc_start_mwh = battery.soc_initial_mwh;
  run.committed.steps.reserve(n);

  double soc = battery.soc_initial_mwh;
  std::size_t t = 0;
  while (t < n) {
    const std::size_t window_len =
        std::min<std::size_t>(static_cast<std::size_t>(config.horizon_steps),
                              n - t);
    // A horizon shorter than the stride would run out of plan before the
    // next scheduled decision, so the commit is clamped to the plan and the
    // controller replans early (off the publication grid, hence from a
    // partially aged forecast) rather than leaving steps uncontrolled.
    const std::size_t commit_len =
        std::min<std::size_t>(static_cast<std::size_t>(config.stride_steps),
                              window_len);

    const Forecast& fc = forecasts.latest_at(t);
    const std::size_t lead0 = t - fc.issue_step;
    if (lead0 + window_len > fc.values.size()) {
      std::ostringstream msg;
      msg << "run_mpc: forecast issued at step " << fc.issue_step
          << " covers " << fc.values.size() << " steps but the window at step "
          << t << " needs " << lead0 + window_len
          << "; increase the forecast horizon";
      throw std::invalid_argument(msg.str());
    }
    Series window(truth_spot.step_hours,
                  std::vector<double>(fc.values.values.begin() +
                                          static_cast<std::ptrdiff_t>(lead0),
                                      fc.values.values.begin() +
                                          static_cast<std::ptrdiff_t>(
                                              lead0 + window_len)));
    const auto window_prices = split_prices(window, market);
    const Schedule plan = solve_window(window_prices.first,
                                       window_prices.second, battery, market,
                                       soc, nullptr);
    run.window_objectives.push_back(plan.objective_eur);

    // Commit the planned prefix, priced at what the truth series actually
    // paid rather than at the forecast the plan was drawn from.
    double block = 0.0;
    for (std::size_t k = 0; k < commit_len; ++k) {
      const ScheduleStep& st = plan.steps[k];
      block += (truth_prices.second.values[t + k] * st.grid_out_mw -
                truth_prices.first.values[t + k] * st.grid_in_mw) *
               truth_spot.step_hours;
      soc = st.soc_mwh;
      run.committed.steps.push_back(st);
    }
    run.block_realized_eur.push_back(block);
    t += commit_len;
  }

  run.realized_revenue_eur = 0.0;
  for (double b : run.block_realized_eur) run.realized_revenue_eur += b;
  run.committed.objective_eur = run.realized_revenue_eur;
  return run;
}

}  // namespace hzn
