#include "hzn/milp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "hzn/lp.hpp"

namespace hzn {

namespace {

constexpr double kFeasTol = 1e-9;        // feasibility and cleanup threshold
constexpr double kPairTol = 1e-7;        // exclusivity violation that branches
constexpr double kObjTol = 1e-9;         // branch-and-bound pruning margin
constexpr double kLatticeTol = 1e-9;     // SoC lattice merge / matching slack
constexpr int kMaxNodes = 5000;
constexpr int kBranchPairLimit = 6;      // more fractional pairs than this and
                                         // branching is hopeless; see below

/** Window LP in reduced form. Columns per step t (T steps):
 *   c    [0,T)    charge power
 *   d    [T,2T)   discharge power
 *   gin  [2T,3T)  grid import
 *   gout [3T,4T)  grid export
 *   s    [4T,5T)  state of charge
 *   x1   [5T,6T)  slack of c/Pc + d/Pd <= 1
 *   x2   [6T,7T)  slack of gin/Gin + gout/Gout <= 1
 * Rows: balance [0,T), SoC dynamics [T,2T), the two exclusivity rows
 * [2T,3T) and [3T,4T). The relaxed exclusivity rows are the projection of
 * the binary formulation (z, y in [0,1]) onto the continuous variables, so
 * relaxation objectives and branching behave identically.
 *
 * The tableau is built directly in reduced form for the starting basis
 * {gin_t, s_t, x1_t, x2_t}: SoC rows arrive as running sums (cumulative
 * dynamics) and the x2 rows have the balance row folded in. That basis is
 * feasible at the all-idle point for every branch-and-bound node, so no
 * phase 1 and no factorization are ever needed.
 */
struct WindowModel {
  int T = 0;
  double dt = 1.0;
  double eta = 1.0;
  lp::Problem prob;      // only c / lo / up are populated (reduced-form use)
  lp::Tableau pristine;  // reduced tableau at the warm-start basis

  int col_c(int t) const { return t; }
  int col_d(int t) const { return T + t; }
  int col_gin(int t) const { return 2 * T + t; }
  int col_gout(int t) const { return 3 * T + t; }
  int col_s(int t) const { return 4 * T + t; }
};

void check_window_inputs(const Series& buy, const Series& sell,
                         const BatterySpec& battery, double soc_start) {
  battery.validate();
  if (buy.size() != sell.size() || buy.empty()) {
    throw std::invalid_argument(
        "solve_window: buy/sell series must be non-empty and equally long");
  }
  if (buy.step_hours != sell.step_hours || !(buy.step_hours > 0.0)) {
    throw std::invalid_argument("solve_window: inconsistent step_hours");
  }
  for (std::size_t i = 0; i < buy.size(); ++i) {
    if (!std::isfinite(buy.values[i]) || !std::isfinite(sell.values[i])) {
      throw std::invalid_argument("solve_window: non-finite price");
    }
  }
  if (!(soc_start >= -kFeasTol &&
        soc_start <= battery.capacity_mwh + kFeasTol)) {
    throw std::invalid_argument("solve_window: initial SoC outside [0, capacity]");
  }
}

WindowModel build_window(const Series& buy, const Series& sell,
                         const BatterySpec& battery, const MarketParams& market,
                         double soc_start) {
  WindowModel w;
  w.T = static_cast<int>(buy.size());
  w.dt = buy.step_hours;
  w.eta = battery.efficiency;
  const int T = w.T;
  const int n = 7 * T;
  const int m = 4 * T;
  const double pc = battery.charge_power_mw;
  const double pd = battery.discharge_power_mw;
  const double gin_cap = market.grid_in_cap(battery);
  const double gout_cap = market.grid_out_cap(battery);

  lp::Problem& p = w.prob;
  p.m = m;
  p.n = n;
  p.c.assign(static_cast<std::size_t>(n), 0.0);
  p.lo.assign(static_cast<std::size_t>(n), 0.0);
  p.up.assign(static_cast<std::size_t>(n), lp::kInf);
  for (int t = 0; t < T; ++t) {
    p.c[static_cast<std::size_t>(w.col_gin(t))] =
        buy.values[static_cast<std::size_t>(t)] * w.dt;
    p.c[static_cast<std::size_t>(w.col_gout(t))] =
        -sell.values[static_cast<std::size_t>(t)] * w.dt;
    p.up[static_cast<std::size_t>(w.col_c(t))] = pc;
    p.up[static_cast<std::size_t>(w.col_d(t))] = pd;
    p.up[static_cast<std::size_t>(w.col_gin(t))] = gin_cap;
    p.up[static_cast<std::size_t>(w.col_gout(t))] = gout_cap;
    p.up[static_cast<std::size_t>(w.col_s(t))] = battery.capacity_mwh;
  }

  lp::Tableau& tab = w.pristine;
  tab.m = m;
  tab.n = n;
  tab.t.assign(static_cast<std::size_t>(m) * n, 0.0);
  tab.xb.assign(static_cast<std::size_t>(m), 0.0);
  tab.basis.resize(static_cast<std::size_t>(m));
  tab.at_upper.assign(static_cast<std::size_t>(n), 0);
  auto at = [&](int row, int col) -> double& {
    return tab.t[static_cast<std::size_t>(row) * n + col];
  };
  for (int t = 0; t < T; ++t) {
    // Balance row t: gin + d - gout - c = 0.
    at(t, w.col_gin(t)) = 1.0;
    at(t, w.col_d(t)) = 1.0;
    at(t, w.col_gout(t)) = -1.0;
    at(t, w.col_c(t)) = -1.0;
    tab.basis[static_cast<std::size_t>(t)] = w.col_gin(t);
    tab.xb[static_cast<std::size_t>(t)] = 0.0;

    // SoC row t, cumulative form: s_t - sum_{tau<=t} (eta*c - d)*dt = soc_start.
    const int row_s = T + t;
    at(row_s, w.col_s(t)) = 1.0;
    for (int tau = 0; tau <= t; ++tau) {
      at(row_s, w.col_c(tau)) = -w.eta * w.dt;
      at(row_s, w.col_d(tau)) = w.dt;
    }
    tab.basis[static_cast<std::size_t>(row_s)] = w.col_s(t);
    tab.xb[static_cast<std::size_t>(row_s)] = soc_start;

    // Charge/discharge exclusivity row: c/Pc + d/Pd + x1 = 1.
    const int row_x1 = 2 * T + t;
    at(row_x1, w.col_c(t)) = 1.0 / pc;
    at(row_x1, w.col_d(t)) = 1.0 / pd;
    at(row_x1, 5 * T + t) = 1.0;
    tab.basis[static_cast<std::size_t>(row_x1)] = 5 * T + t;
    tab.xb[static_cast<std::size_t>(row_x1)] = 1.0;

    // Import/export exclusivity row with the balance row folded in
    // (keeps the starting basis triangular-free):
    // (c - d)/Gin + (1/Gin + 1/Gout)*gout + x2 = 1.
    const int row_x2 = 3 * T + t;
    at(row_x2, w.col_c(t)) = 1.0 / gin_cap;
    at(row_x2, w.col_d(t)) = -1.0 / gin_cap;
    at(row_x2, w.col_gout(t)) = 1.0 / gin_cap + 1.0 / gout_cap;
    at(row_x2, 6 * T + t) = 1.0;
    tab.basis[static_cast<std::size_t>(row_x2)] = 6 * T + t;
    tab.xb[static_cast<std::size_t>(row_x2)] = 1.0;
  }
  return w;
}

struct NodeSolution {
  std::vector<double> x;
  double objective = 0.0;  // maximization value
  int iterations = 0;
};

NodeSolution solve_node(const WindowModel& w, const std::vector<int>& fixed_cols) {
  lp::Problem prob = w.prob;  // bounds are modified per node
  for (int col : fixed_cols) {
    prob.up[static_cast<std::size_t>(col)] = 0.0;
  }
  lp::Tableau tab = w.pristine;
  NodeSolution out;
  const lp::Status st =
      lp::primal_simplex(tab, prob, 0, &out.iterations);
  if (st != lp::Status::optimal) {
    std::ostringstream msg;
    msg << "window LP did not reach optimality (status "
        << static_cast<int>(st) << ", T=" << w.T << ", "
        << out.iterations << " iterations)";
    throw std::runtime_error(msg.str());
  }
  out.x = lp::extract(tab, prob);
  double v = 0.0;
  for (int j = 0; j < prob.n; ++j) {
    v += prob.c[static_cast<std::size_t>(j)] * out.x[static_cast<std::size_t>(j)];
  }
  out.objective = -v;  // stored costs minimize the negated revenue
  return out;
}

/// First step whose exclusive pair is jointly active beyond tolerance.
/// Charge/discharge pairs are checked for every step before the grid pairs.
struct PairViolation {
  bool found = false;
  int col_a = 0;  // fixing this models binary = 0 side
  int col_b = 0;  // fixing this models binary = 1 side
};

PairViolation first_violation(const WindowModel& w, const std::vector<double>& x) {
  PairViolation v;
  for (int t = 0; t < w.T; ++t) {
    const double c = x[static_cast<std::size_t>(w.col_c(t))];
    const double d = x[static_cast<std::size_t>(w.col_d(t))];
    if (std::min(c, d) > kPairTol) {
      v.found = true;
      v.col_a = w.col_c(t);
      v.col_b = w.col_d(t);
      return v;
    }
  }
  for (int t = 0; t < w.T; ++t) {
    const double gi = x[static_cast<std::size_t>(w.col_gin(t))];
    const double go = x[static_cast<std::size_t>(w.col_gout(t))];
    if (std::min(gi, go) > kPairTol) {
      v.found = true;
      v.col_a = w.col_gin(t);
      v.col_b = w.col_gout(t);
      return v;
    }
  }
  return v;
}

int count_pair_violations(const WindowModel& w, const std::vector<double>& x) {
  int count = 0;
  for (int t = 0; t < w.T; ++t) {
    if (std::min(x[static_cast<std::size_t>(w.col_c(t))],
                 x[static_cast<std::size_t>(w.col_d(t))]) > kPairTol) {
      ++count;
    }
    if (std::min(x[static_cast<std::size_t>(w.col_gin(t))],
                 x[static_cast<std::size_t>(w.col_gout(t))]) > kPairTol) {
      ++count;
    }
  }
  return count;
}

Schedule schedule_from_solution(const WindowModel& w, const Series& buy,
                                const Series& sell, const BatterySpec& battery,
                                const MarketParams& market, double soc_start,
                                const std::vector<double>& x) {
  Schedule sched;
  sched.step_hours = w.dt;
  sched.soc_start_mwh = soc_start;
  sched.steps.resize(static_cast<std::size_t>(w.T));
  const double gin_cap = market.grid_in_cap(battery);
  const double gout_cap = market.grid_out_cap(battery);

  double soc = soc_start;
  double objective = 0.0;
  for (int t = 0; t < w.T; ++t) {
    double c = x[static_cast<std::size_t>(w.col_c(t))];
    double d = x[static_cast<std::size_t>(w.col_d(t))];
    if (c <= kFeasTol) c = 0.0;
    if (d <= kFeasTol) d = 0.0;
    if (c > 0.0 && d > 0.0) {
      std::ostringstream msg;
      msg << "exclusivity violated after branch-and-bound at step " << t
          << " (charge " << c << ", discharge " << d << ")";
      throw std::runtime_error(msg.str());
    }
    // Balance pins the grid side exactly once the battery side is settled.
    const double net = c - d;
    const double gin = net > 0.0 ? net : 0.0;
    const double gout = net < 0.0 ? -net : 0.0;
    soc += (w.eta * c - d) * w.dt;

    ScheduleStep& st = sched.steps[static_cast<std::size_t>(t)];
    st.charge_mw = c;
    st.discharge_mw = d;
    st.grid_in_mw = gin;
    st.grid_out_mw = gout;
    st.soc_mwh = soc;
    st.charging = c > 0.0;
    st.importing = gin > 0.0;

    if (c > battery.charge_power_mw + kFeasTol ||
        d > battery.discharge_power_mw + kFeasTol ||
        gin > gin_cap + kFeasTol || gout > gout_cap + kFeasTol ||
        soc < -kFeasTol || soc > battery.capacity_mwh + kFeasTol) {
      std::ostringstream msg;
      msg << "window solution violates bounds at step " << t << " (c=" << c
          << " d=" << d << " gin=" << gin << " gout=" << gout << " soc=" << soc
          << ")";
      throw std::runtime_error(msg.str());
    }
    objective += (sell.values[static_cast<std::size_t>(t)] * gout -
                  buy.values[static_cast<std::size_t>(t)] * gin) *
                 w.dt;
  }
  sched.objective_eur = objective;
  return sched;
}

/* Exact fallback for windows whose relaxation is far from complementary.
 *
 * When the buy price drops below eta times the sell price (deeply negative
 * spot), the relaxation charges and discharges at once in an SoC-neutral mix
 * and books the spread as profit. That mix sits inside the per-step convex
 * hull, so no cut removes it, and because every such step inflates the bound
 * independently the branch-and-bound tree grows like 2^(number of such
 * steps). Windows over a strongly negative price stretch are therefore
 * solved by the dynamic program below instead.
 *
 * It works on a collapsed form of the same problem. Any solution honouring
 * both exclusivity pairs has g_in = c and g_out = d: with d = 0 the balance
 * reads g_in = g_out + c, which under g_in * g_out = 0 leaves pure
 * import-charge or total idleness, and symmetrically for c = 0. So a step is
 * fully described by its SoC move a = s_t - s_{t-1}, earning
 *     -(buy_t / eta) * a   for a >= 0   (import-charge)
 *     -sell_t * a          for a <  0   (export-discharge)
 * with a bounded by the effective power caps and the SoC box.
 *
 * The moves of some optimal schedule stay on a finite lattice. At a vertex
 * of the feasible region, perturbing any step that is strictly inside its
 * power bounds must be blocked downstream by an SoC at 0 or capacity;
 * between two such contacts at most one step is partial, and its landing
 * point is pinned by the surrounding contacts. Every visited SoC is then
 * one of {0, capacity, soc_start} plus integer multiples of the full-power
 * moves +eta*Pc*dt and -Pd*dt, at most T of them in total. A backward value
 * iteration over that lattice, with a sliding-window maximum per price side,
 * finds the exact optimum in O(T * lattice) time.
 */
std::vector<double> lattice_states(double cap, double soc0, double up_move,
                                   double dn_move, int T) {
  std::vector<double> pts;
  pts.reserve(256);
  const double bases[3] = {0.0, cap, soc0};
  for (const double base : bases) {
    for (int n = -T; n <= T; ++n) {
      const double from = base + static_cast<double>(n) * up_move;
      const int span = T - std::abs(n);
      for (int m = -span; m <= span; ++m) {
        const double v = from + static_cast<double>(m) * dn_move;
        if (v >= -kLatticeTol && v <= cap + kLatticeTol) {
          pts.push_back(std::clamp(v, 0.0, cap));
        }
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> states;
  states.reserve(pts.size());
  for (const double v : pts) {
    if (states.empty() || v - states.back() > kLatticeTol) states.push_back(v);
  }
  for (double& v : states) {
    if (std::abs(v - soc0) <= kLatticeTol) {
      v = soc0;  // the start state must be hit exactly
      break;
    }
  }
  return states;
}

std::vector<double> solve_collapsed_dp(const WindowModel& w, const Series& buy,
                                       const Series& sell,
                                       const BatterySpec& battery,
                                       const MarketParams& market,
                                       double soc0) {
  const int T = w.T;
  const double dt = w.dt;
  const double eta = w.eta;
  const double pc = std::min(battery.charge_power_mw, market.grid_in_cap(battery));
  const double pd = std::min(battery.discharge_power_mw, market.grid_out_cap(battery));
  const double up_move = eta * pc * dt;  // SoC gained by one full-power charge
  const double dn_move = pd * dt;        // SoC spent by one full-power discharge

  const std::vector<double> S =
      lattice_states(battery.capacity_mwh, soc0, up_move, dn_move, T);
  const int K = static_cast<int>(S.size());
  int start = -1;
  for (int i = 0; i < K; ++i) {
    if (S[static_cast<std::size_t>(i)] == soc0) {
      start = i;
      break;
    }
  }
  if (start < 0) {
    throw std::logic_error("window dp: start state missing from lattice");
  }

  // hi[i] / lo[i]: furthest state reachable by one charge / one discharge.
  std::vector<int> hi(static_cast<std::size_t>(K));
  std::vector<int> lo(static_cast<std::size_t>(K));
  {
    int h = 0, l = 0;
    for (int i = 0; i < K; ++i) {
      if (h < i) h = i;
      while (h + 1 < K && S[static_cast<std::size_t>(h + 1)] <=
                              S[static_cast<std::size_t>(i)] + up_move + kLatticeTol) {
        ++h;
      }
      hi[static_cast<std::size_t>(i)] = h;
      while (S[static_cast<std::size_t>(l)] <
             S[static_cast<std::size_t>(i)] - dn_move - kLatticeTol) {
        ++l;
      }
      lo[static_cast<std::size_t>(i)] = l;
    }
  }

  // value[t*K + i]: best revenue from step t onward when s_{t-1} = S[i].
  std::vector<double> value(static_cast<std::size_t>(T + 1) * K, 0.0);
  std::vector<int> dq(static_cast<std::size_t>(K));
  std::vector<double> dqv(static_cast<std::size_t>(K));
  for (int t = T - 1; t >= 0; --t) {
    const double* vnext = &value[static_cast<std::size_t>(t + 1) * K];
    double* vt = &value[static_cast<std::size_t>(t) * K];
    const double rate_up = buy.values[static_cast<std::size_t>(t)] / eta;
    const double rate_dn = sell.values[static_cast<std::size_t>(t)];
    // charge side: best j in [i, hi[i]] of vnext[j] - rate_up * S[j],
    // a classic sliding-window maximum since both ends only move right
    {
      int head = 0, tail = 0, next = 0;
      for (int i = 0; i < K; ++i) {
        while (next <= hi[static_cast<std::size_t>(i)]) {
          const double cand =
              vnext[next] - rate_up * S[static_cast<std::size_t>(next)];
          while (tail > head && dqv[static_cast<std::size_t>(tail - 1)] <= cand) {
            --tail;
          }
          dq[static_cast<std::size_t>(tail)] = next;
          dqv[static_cast<std::size_t>(tail)] = cand;
          ++tail;
          ++next;
        }
        while (dq[static_cast<std::size_t>(head)] < i) ++head;
        vt[i] = rate_up * S[static_cast<std::size_t>(i)] +
                dqv[static_cast<std::size_t>(head)];
      }
    }
    // discharge side: best j in [lo[i], i] of vnext[j] - rate_dn * S[j]
    {
      int head = 0, tail = 0, next = 0;
      for (int i = 0; i < K; ++i) {
        while (next <= i) {
          const double cand =
              vnext[next] - rate_dn * S[static_cast<std::size_t>(next)];
          while (tail > head && dqv[static_cast<std::size_t>(tail - 1)] <= cand) {
            --tail;
          }
          dq[static_cast<std::size_t>(tail)] = next;
          dqv[static_cast<std::size_t>(tail)] = cand;
          ++tail;
          ++next;
        }
        while (dq[static_cast<std::size_t>(head)] <
               lo[static_cast<std::size_t>(i)]) {
          ++head;
        }
        const double v = rate_dn * S[static_cast<std::size_t>(i)] +
                         dqv[static_cast<std::size_t>(head)];
        if (v > vt[i]) vt[i] = v;
      }
    }
  }

  // forward pass: replay the argmax; ties keep the smallest move, preferring
  // idle, then charging
  std::vector<double> x(static_cast<std::size_t>(7) * T, 0.0);
  int cur = start;
  for (int t = 0; t < T; ++t) {
    const double* vnext = &value[static_cast<std::size_t>(t + 1) * K];
    const double rate_up = buy.values[static_cast<std::size_t>(t)] / eta;
    const double rate_dn = sell.values[static_cast<std::size_t>(t)];
    const double s_cur = S[static_cast<std::size_t>(cur)];
    int best_j = cur;
    double best = vnext[cur];
    for (int j = cur + 1; j <= hi[static_cast<std::size_t>(cur)]; ++j) {
      const double v =
          vnext[j] - rate_up * (S[static_cast<std::size_t>(j)] - s_cur);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    for (int j = cur - 1; j >= lo[static_cast<std::size_t>(cur)]; --j) {
      const double v =
          vnext[j] - rate_dn * (S[static_cast<std::size_t>(j)] - s_cur);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    if (best_j > cur) {
      const double move = S[static_cast<std::size_t>(best_j)] - s_cur;
      x[static_cast<std::size_t>(w.col_c(t))] = std::min(move / (eta * dt), pc);
    } else if (best_j < cur) {
      const double move = s_cur - S[static_cast<std::size_t>(best_j)];
      x[static_cast<std::size_t>(w.col_d(t))] = std::min(move / dt, pd);
    }
    cur = best_j;
  }
  return x;
}

}  // namespace

void BatterySpec::validate() const {
  if (!(capacity_mwh > 0.0)) {
    throw std::invalid_argument("battery: capacity must be > 0");
  }
  if (!(charge_power_mw > 0.0) || !(discharge_power_mw > 0.0)) {
    throw std::invalid_argument("battery: power limits must be > 0");
  }
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("battery: efficiency must be in (0, 1]");
  }
  if (!(soc_initial_mwh >= 0.0 && soc_initial_mwh <= capacity_mwh)) {
    throw std::invalid_argument("battery: initial SoC outside [0, capacity]");
  }
}

double MarketParams::grid_in_cap(const BatterySpec& b) const {
  return grid_in_cap_mw > 0.0
             ? grid_in_cap_mw
             : std::max(b.charge_power_mw, b.discharge_power_mw);
}

double MarketParams::grid_out_cap(const BatterySpec& b) const {
  return grid_out_cap_mw > 0.0
             ? grid_out_cap_mw
             : std::max(b.charge_power_mw, b.discharge_power_mw);
}

std::pair<Series, Series> split_prices(const Series& spot,
                                       const MarketParams& m) {
  Series buy(spot.step_hours, spot.values);
  Series sell(spot.step_hours, spot.values);
  for (std::size_t i = 0; i < spot.size(); ++i) {
    buy.values[i] = m.buy_multiplier * spot.values[i] + m.buy_offset_eur;
    sell.values[i] = m.sell_multiplier * spot.values[i] + m.sell_offset_eur;
  }
  return {std::move(buy), std::move(sell)};
}

RelaxedSolution lp_relaxation_solve(const Series& buy, const Series& sell,
                                    const BatterySpec& battery,
                                    const MarketParams& market,
                                    double soc_start_mwh) {
  check_window_inputs(buy, sell, battery, soc_start_mwh);
  const WindowModel w = build_window(buy, sell, battery, market, soc_start_mwh);
  const NodeSolution root = solve_node(w, {});
  RelaxedSolution out;
  out.objective_eur = root.objective;
  out.complementary = !first_violation(w, root.x).found;
  const int T = w.T;
  out.charge_mw.resize(static_cast<std::size_t>(T));
  out.discharge_mw.resize(static_cast<std::size_t>(T));
  out.soc_mwh.resize(static_cast<std::size_t>(T));
  out.grid_in_mw.resize(static_cast<std::size_t>(T));
  out.grid_out_mw.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    out.charge_mw[static_cast<std::size_t>(t)] =
        root.x[static_cast<std::size_t>(w.col_c(t))];
    out.discharge_mw[static_cast<std::size_t>(t)] =
        root.x[static_cast<std::size_t>(w.col_d(t))];
    out.soc_mwh[static_cast<std::size_t>(t)] =
        root.x[static_cast<std::size_t>(w.col_s(t))];
    out.grid_in_mw[static_cast<std::size_t>(t)] =
        root.x[static_cast<std::size_t>(w.col_gin(t))];
    out.grid_out_mw[static_cast<std::size_t>(t)] =
        root.x[static_cast<std::size_t>(w.col_gout(t))];
  }
  return out;
}

Schedule solve_window(const Series& buy, const Series& sell,
                      const BatterySpec& battery, const MarketParams& market,
                      double soc_start_mwh, SolveStats* stats) {
  check_window_inputs(buy, sell, battery, soc_start_mwh);
  const double soc0 = std::clamp(soc_start_mwh, 0.0, battery.capacity_mwh);
  const WindowModel w = build_window(buy, sell, battery, market, soc0);

  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  st = SolveStats{};

  const NodeSolution root = solve_node(w, {});
  st.nodes = 1;
  st.lp_iterations = root.iterations;
  st.relaxation_objective = root.objective;
  const PairViolation root_viol = first_violation(w, root.x);
  if (!root_viol.found) {
    st.relaxation_integral = true;
    return schedule_from_solution(w, buy, sell, battery, market, soc0, root.x);
  }

  if (count_pair_violations(w, root.x) <= kBranchPairLimit) {
    struct Node {
      std::vector<int> fixed;
      double bound = 0.0;  // parent objective: valid upper bound
      int depth = 0;
      long id = 0;
    };
    struct NodeOrder {
      bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound < b.bound;  // larger bound first
        if (a.depth != b.depth) return a.depth < b.depth;  // then deeper first
        return a.id > b.id;                                // then lower id
      }
    };
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long next_id = 0;
    open.push(Node{{root_viol.col_a}, root.objective, 1, next_id++});
    open.push(Node{{root_viol.col_b}, root.objective, 1, next_id++});

    double incumbent = -std::numeric_limits<double>::infinity();
    std::vector<double> incumbent_x;
    bool exhausted = false;

    while (!open.empty()) {
      Node node = open.top();
      open.pop();
      if (node.bound <= incumbent + kObjTol) {
        break;  // best-bound order: nothing left can improve
      }
      if (st.nodes >= kMaxNodes) {
        exhausted = true;  // pathological tree: the lattice solve takes over
        break;
      }
      const NodeSolution sol = solve_node(w, node.fixed);
      ++st.nodes;
      st.lp_iterations += sol.iterations;
      if (sol.objective <= incumbent + kObjTol) {
        continue;
      }
      const PairViolation viol = first_violation(w, sol.x);
      if (!viol.found) {
        incumbent = sol.objective;
        incumbent_x = sol.x;
        continue;
      }
      Node zero_side{node.fixed, sol.objective, node.depth + 1, next_id++};
      zero_side.fixed.push_back(viol.col_a);
      Node one_side{node.fixed, sol.objective, node.depth + 1, next_id++};
      one_side.fixed.push_back(viol.col_b);
      open.push(std::move(zero_side));
      open.push(std::move(one_side));
    }

    if (!exhausted) {
      if (incumbent_x.empty()) {
        throw std::runtime_error(
            "solve_window: no feasible schedule found (unexpected)");
      }
      return schedule_from_solution(w, buy, sell, battery, market, soc0,
                                    incumbent_x);
    }
  }

  const std::vector<double> x =
      solve_collapsed_dp(w, buy, sell, battery, market, soc0);
  return schedule_from_solution(w, buy, sell, battery, market, soc0, x);
}

void write_schedule_csv(const Schedule& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << "t,charge_mw,discharge_mw,soc_mwh,grid_in_mw,grid_out_mw\n";
  for (std::size_t t = 0; t < s.steps.size(); ++t) {
    const ScheduleStep& st = s.steps[t];
    out << t << ',' << format_number(st.charge_mw) << ','
        << format_number(st.discharge_mw) << ',' << format_number(st.soc_mwh)
        << ',' << format_number(st.grid_in_mw) << ','
        << format_number(st.grid_out_mw) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

std::string dump_window_model(const Series& buy, const Series& sell,
                              const BatterySpec& battery,
                              const MarketParams& market,
                              double soc_start_mwh) {
  check_window_inputs(buy, sell, battery, soc_start_mwh);
  const int T = static_cast<int>(buy.size());
  const double dt = buy.step_hours;
  const double gin_cap = market.grid_in_cap(battery);
  const double gout_cap = market.grid_out_cap(battery);
  std::ostringstream os;
  os << "\\ dispatch window: T=" << T << " steps, dt=" << dt
     << " h, eta=" << battery.efficiency << ", soc0=" << soc_start_mwh << "\n";
  os << "Maximize\n obj:";
  for (int t = 0; t < T; ++t) {
    os << (t ? " +" : " ") << sell.values[static_cast<std::size_t>(t)] * dt
       << " gout" << t << " - " << buy.values[static_cast<std::size_t>(t)] * dt
       << " gin" << t;
  }
  os << "\nSubject To\n";
  for (int t = 0; t < T; ++t) {
    os << " bal" << t << ": gin" << t << " + d" << t << " - gout" << t
       << " - c" << t << " = 0\n";
  }
  for (int t = 0; t < T; ++t) {
    os << " soc" << t << ": s" << t;
    if (t > 0) os << " - s" << t - 1;
    os << " - " << battery.efficiency * dt << " c" << t << " + " << dt << " d"
       << t << " = " << (t == 0 ? soc_start_mwh : 0.0) << "\n";
  }
  for (int t = 0; t < T; ++t) {
    os << " exb" << t << ": c" << t << " <= " << battery.charge_power_mw
       << " z" << t << ", d" << t << " <= " << battery.discharge_power_mw
       << " (1 - z" << t << ")\n";
    os << " exg" << t << ": gin" << t << " <= " << gin_cap << " y" << t
       << ", gout" << t << " <= " << gout_cap << " (1 - y" << t << ")\n";
  }
  os << "Bounds\n";
  for (int t = 0; t < T; ++t) {
    os << " 0 <= s" << t << " <= " << battery.capacity_mwh << "\n";
  }
  os << "Binaries\n";
  for (int t = 0; t < T; ++t) {
    os << " z" << t << " y" << t << (t + 1 == T ? "\n" : "");
  }
  os << "End\n";
  return os.str();
}

}  // namespace hzn
