#include "hzn/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hzn::lp {

namespace {

constexpr double kDualTol = 1e-9;   // reduced-cost threshold
constexpr double kPivTol = 1e-9;    // smallest acceptable pivot element
constexpr double kRatioTie = 1e-12;

// Value a nonbasic column currently takes.
inline double nonbasic_value(const Problem& p, const Tableau& tab, int j) {
  return tab.at_upper[static_cast<std::size_t>(j)]
             ? p.up[static_cast<std::size_t>(j)]
             : p.lo[static_cast<std::size_t>(j)];
}

void refresh_reduced_costs(const Tableau& tab, const Problem& p,
                           std::vector<double>& d) {
  d.assign(p.c.begin(), p.c.end());
  for (int i = 0; i < tab.m; ++i) {
    const double cb = p.c[static_cast<std::size_t>(tab.basis[i])];
    if (cb == 0.0) continue;
    const double* row = tab.t.data() + static_cast<std::size_t>(i) * tab.n;
    for (int j = 0; j < tab.n; ++j) {
      d[static_cast<std::size_t>(j)] -= cb * row[j];
    }
  }
}

}  // namespace

Status primal_simplex(Tableau& tab, const Problem& p, int max_iterations,
                      int* iterations_out) {
  const int m = tab.m;
  const int n = tab.n;
  if (max_iterations <= 0) max_iterations = 100 * (m + n) + 1000;

  std::vector<unsigned char> is_basic(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < m; ++i) {
    is_basic[static_cast<std::size_t>(tab.basis[i])] = 1;
  }

  std::vector<double> d;
  refresh_reduced_costs(tab, p, d);

  bool bland = false;
  int stall = 0;
  const int stall_limit = m + n + 64;
  int since_refresh = 0;
  int iter = 0;

  for (; iter < max_iterations; ++iter) {
    if (++since_refresh >= 64) {
      refresh_reduced_costs(tab, p, d);
      since_refresh = 0;
    }

    // Pricing: most attractive reduced cost, or first eligible under Bland.
    int q = -1;
    double best = kDualTol;
    for (int j = 0; j < n; ++j) {
      if (is_basic[static_cast<std::size_t>(j)]) continue;
      if (p.lo[static_cast<std::size_t>(j)] == p.up[static_cast<std::size_t>(j)])
        continue;  // fixed
      const double dj = d[static_cast<std::size_t>(j)];
      const double score = tab.at_upper[static_cast<std::size_t>(j)] ? dj : -dj;
      if (score > best) {
        q = j;
        if (bland) break;
        best = score;
      }
    }
    if (q < 0) {
      if (iterations_out) *iterations_out = iter;
      return Status::optimal;
    }

    const double sigma = tab.at_upper[static_cast<std::size_t>(q)] ? -1.0 : 1.0;
    const double* colbase = tab.t.data();

    // Ratio test over the basic variables.
    double flip_limit = p.up[static_cast<std::size_t>(q)] -
                        p.lo[static_cast<std::size_t>(q)];  // may be inf
    int leave_row = -1;
    bool leave_to_upper = false;
    double t_row = kInf;
    double piv_mag = 0.0;
    for (int i = 0; i < m; ++i) {
      const double w = colbase[static_cast<std::size_t>(i) * n + q];
      if (std::abs(w) <= kPivTol) continue;
      const double delta = -sigma * w;  // change of xb[i] per unit move
      const int bi = tab.basis[i];
      double ti;
      bool to_upper;
      if (delta < 0.0) {
        const double room = tab.xb[static_cast<std::size_t>(i)] -
                            p.lo[static_cast<std::size_t>(bi)];
        ti = (room > 0.0 ? room : 0.0) / (-delta);
        to_upper = false;
      } else {
        const double ub = p.up[static_cast<std::size_t>(bi)];
        if (ub == kInf) continue;
        const double room = ub - tab.xb[static_cast<std::size_t>(i)];
        ti = (room > 0.0 ? room : 0.0) / delta;
        to_upper = true;
      }
      bool take = false;
      if (ti < t_row - kRatioTie) {
        take = true;
      } else if (ti < t_row + kRatioTie && leave_row >= 0) {
        if (bland) {
          take = bi < tab.basis[leave_row];
        } else if (std::abs(w) > piv_mag * (1.0 + 1e-12)) {
          take = true;
        } else if (std::abs(w) > piv_mag * (1.0 - 1e-12)) {
          take = bi < tab.basis[leave_row];
        }
      }
      if (take) {
        leave_row = i;
        t_row = ti;
        piv_mag = std::abs(w);
        leave_to_upper = to_upper;
      }
    }

    if (leave_row < 0 && flip_limit == kInf) {
      if (iterations_out) *iterations_out = iter;
      return Status::unbounded;
    }

    if (flip_limit < t_row - kRatioTie) {
      // Bound flip: the entering column crosses to its other bound.
      const double t = flip_limit;
      for (int i = 0; i < m; ++i) {
        const double w = colbase[static_cast<std::size_t>(i) * n + q];
        if (w != 0.0) tab.xb[static_cast<std::size_t>(i)] += -sigma * w * t;
      }
      tab.at_upper[static_cast<std::size_t>(q)] ^= 1u;
      stall = t <= kRatioTie ? stall + 1 : 0;
      if (stall > stall_limit) bland = true;
      continue;
    }

    const double t = std::max(t_row, 0.0);
    const int r = leave_row;
    const int leaving = tab.basis[r];

    // Move the current point.
    for (int i = 0; i < m; ++i) {
      const double w = colbase[static_cast<std::size_t>(i) * n + q];
      if (w != 0.0) tab.xb[static_cast<std::size_t>(i)] += -sigma * w * t;
    }
    const double entering_value = nonbasic_value(p, tab, q) + sigma * t;

    // Snap the leaving variable exactly onto its bound.
    tab.at_upper[static_cast<std::size_t>(leaving)] =
        leave_to_upper ? 1u : 0u;
    is_basic[static_cast<std::size_t>(leaving)] = 0;
    is_basic[static_cast<std::size_t>(q)] = 1;

    // Eliminate the entering column.
    double* rowr = tab.t.data() + static_cast<std::size_t>(r) * n;
    const double inv = 1.0 / rowr[q];
    for (int j = 0; j < n; ++j) rowr[j] *= inv;
    rowr[q] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double* rowi = tab.t.data() + static_cast<std::size_t>(i) * n;
      const double f = rowi[q];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) rowi[j] -= f * rowr[j];
      rowi[q] = 0.0;
    }
    const double dq = d[static_cast<std::size_t>(q)];
    if (dq != 0.0) {
      for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(j)] -= dq * rowr[j];
      d[static_cast<std::size_t>(q)] = 0.0;
    }

    tab.basis[r] = q;
    tab.xb[static_cast<std::size_t>(r)] = entering_value;

    stall = t <= kRatioTie ? stall + 1 : 0;
    if (stall > stall_limit) {
      bland = true;
    } else if (bland && stall == 0) {
      bland = false;
    }
  }
  if (iterations_out) *iterations_out = iter;
  return Status::iteration_limit;
}

std::vector<double> extract(const Tableau& tab, const Problem& p) {
  std::vector<double> x(static_cast<std::size_t>(tab.n));
  for (int j = 0; j < tab.n; ++j) {
    x[static_cast<std::size_t>(j)] = nonbasic_value(p, tab, j);
  }
  for (int i = 0; i < tab.m; ++i) {
    x[static_cast<std::size_t>(tab.basis[i])] =
        tab.xb[static_cast<std::size_t>(i)];
  }
  return x;
}

Tableau build_tableau(const Problem& p, const std::vector<int>& basis) {
  if (static_cast<int>(basis.size()) != p.m) {
    throw std::invalid_argument("build_tableau: basis size must equal row count");
  }
  const int m = p.m;
  const int n = p.n;
  // Working copy [A | b].
  std::vector<double> w(static_cast<std::size_t>(m) * (n + 1));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      w[static_cast<std::size_t>(i) * (n + 1) + j] =
          p.a[static_cast<std::size_t>(i) * n + j];
    }
    w[static_cast<std::size_t>(i) * (n + 1) + n] =
        p.b[static_cast<std::size_t>(i)];
  }

  std::vector<int> row_col(static_cast<std::size_t>(m), -1);
  std::vector<unsigned char> done(static_cast<std::size_t>(m), 0);
  for (int k = 0; k < m; ++k) {
    const int col = basis[static_cast<std::size_t>(k)];
    int best = -1;
    double mag = 0.0;
    for (int i = 0; i < m; ++i) {
      if (done[static_cast<std::size_t>(i)]) continue;
      const double v =
          std::abs(w[static_cast<std::size_t>(i) * (n + 1) + col]);
      if (v > mag) {
        mag = v;
        best = i;
      }
    }
    if (best < 0 || mag <= kPivTol) {
      throw std::invalid_argument("build_tableau: basis matrix is singular");
    }
    done[static_cast<std::size_t>(best)] = 1;
    row_col[static_cast<std::size_t>(best)] = col;
    double* rowb = w.data() + static_cast<std::size_t>(best) * (n + 1);
    const double inv = 1.0 / rowb[col];
    for (int j = 0; j <= n; ++j) rowb[j] *= inv;
    rowb[col] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == best) continue;
      double* rowi = w.data() + static_cast<std::size_t>(i) * (n + 1);
      const double f = rowi[col];
      if (f == 0.0) continue;
      for (int j = 0; j <= n; ++j) rowi[j] -= f * rowb[j];
      rowi[col] = 0.0;
    }
  }

  Tableau tab;
  tab.m = m;
  tab.n = n;
  tab.t.resize(static_cast<std::size_t>(m) * n);
  tab.xb.resize(static_cast<std::size_t>(m));
  tab.basis = row_col;
  tab.at_upper.assign(static_cast<std::size_t>(n), 0);
  std::vector<unsigned char> is_basic(static_cast<std::size_t>(n), 0);
  for (int c : row_col) is_basic[static_cast<std::size_t>(c)] = 1;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      tab.t[static_cast<std::size_t>(i) * n + j] =
          w[static_cast<std::size_t>(i) * (n + 1) + j];
    }
  }
  // xb = B^-1 b minus contributions of nonbasic columns at their start value
  // (lower bound by convention here).
  for (int i = 0; i < m; ++i) {
    double v = w[static_cast<std::size_t>(i) * (n + 1) + n];
    const double* row = tab.t.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      if (is_basic[static_cast<std::size_t>(j)]) continue;
      const double lj = p.lo[static_cast<std::size_t>(j)];
      if (lj != 0.0) v -= row[j] * lj;
    }
    tab.xb[static_cast<std::size_t>(i)] = v;
  }
  return tab;
}

Result solve(const Problem& p, const std::vector<int>* initial_basis,
             int max_iterations) {
  if (p.m <= 0 || p.n <= 0 ||
      p.a.size() != static_cast<std::size_t>(p.m) * p.n ||
      p.b.size() != static_cast<std::size_t>(p.m) ||
      p.c.size() != static_cast<std::size_t>(p.n) ||
      p.lo.size() != static_cast<std::size_t>(p.n) ||
      p.up.size() != static_cast<std::size_t>(p.n)) {
    throw std::invalid_argument("lp::solve: inconsistent problem dimensions");
  }
  for (int j = 0; j < p.n; ++j) {
    if (!std::isfinite(p.lo[static_cast<std::size_t>(j)])) {
      throw std::invalid_argument("lp::solve: lower bounds must be finite");
    }
    if (p.up[static_cast<std::size_t>(j)] < p.lo[static_cast<std::size_t>(j)]) {
      throw std::invalid_argument("lp::solve: empty bound interval");
    }
  }

  Result res;
  if (initial_basis) {
    Tableau tab = build_tableau(p, *initial_basis);
    res.status = primal_simplex(tab, p, max_iterations, &res.iterations);
    res.x = extract(tab, p);
  } else {
    // Phase 1: artificial column per row, sign-matched to the residual of
    // the all-at-lower-bound point.
    Problem aug;
    aug.m = p.m;
    aug.n = p.n + p.m;
    aug.a.assign(static_cast<std::size_t>(aug.m) * aug.n, 0.0);
    aug.b = p.b;
    aug.c.assign(static_cast<std::size_t>(aug.n), 0.0);
    aug.lo = p.lo;
    aug.up = p.up;
    aug.lo.resize(static_cast<std::size_t>(aug.n), 0.0);
    aug.up.resize(static_cast<std::size_t>(aug.n), kInf);

    std::vector<int> basis(static_cast<std::size_t>(p.m));
    for (int i = 0; i < p.m; ++i) {
      double resid = p.b[static_cast<std::size_t>(i)];
      for (int j = 0; j < p.n; ++j) {
        const double aij = p.a[static_cast<std::size_t>(i) * p.n + j];
        aug.a[static_cast<std::size_t>(i) * aug.n + j] = aij;
        resid -= aij * p.lo[static_cast<std::size_t>(j)];
      }
      aug.a[static_cast<std::size_t>(i) * aug.n + (p.n + i)] =
          resid >= 0.0 ? 1.0 : -1.0;
      aug.c[static_cast<std::size_t>(p.n + i)] = 1.0;
      basis[static_cast<std::size_t>(i)] = p.n + i;
    }

    Tableau tab = build_tableau(aug, basis);
    int it1 = 0;
    const Status s1 = primal_simplex(tab, aug, max_iterations, &it1);
    res.iterations = it1;
    if (s1 == Status::iteration_limit) {
      res.status = s1;
      return res;
    }
    double infeas = 0.0;
    {
      const auto x = extract(tab, aug);
      for (int i = 0; i < p.m; ++i) {
        infeas += x[static_cast<std::size_t>(p.n + i)];
      }
    }
    if (infeas > 1e-7) {
      res.status = Status::infeasible;
      return res;
    }

    // Phase 2: real costs; artificial columns are pinned at zero.
    for (int i = 0; i < p.m; ++i) {
      aug.lo[static_cast<std::size_t>(p.n + i)] = 0.0;
      aug.up[static_cast<std::size_t>(p.n + i)] = 0.0;
      aug.c[static_cast<std::size_t>(p.n + i)] = 0.0;
    }
    for (int j = 0; j < p.n; ++j) {
      aug.c[static_cast<std::size_t>(j)] = p.c[static_cast<std::size_t>(j)];
    }
    int it2 = 0;
    res.status = primal_simplex(tab, aug, max_iterations, &it2);
    res.iterations += it2;
    const auto x = extract(tab, aug);
    res.x.assign(x.begin(), x.begin() + p.n);
  }

  res.objective = 0.0;
  for (int j = 0; j < p.n && res.status == Status::optimal; ++j) {
    res.objective +=
        p.c[static_cast<std::size_t>(j)] * res.x[static_cast<std::size_t>(j)];
  }
  return res;
}

}  // namespace hzn::lp
