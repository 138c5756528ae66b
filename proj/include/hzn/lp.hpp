#pragma once

#include <limits>
#include <vector>

namespace hzn::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status { optimal, unbounded, infeasible, iteration_limit };

/** Linear program in computational form:
 *
 *   minimize c.x  subject to  A x = b,  lo <= x <= up
 *
 * Rows are equalities; the caller encodes inequalities through logical
 * (slack) columns with the appropriate bounds. Lower bounds must be finite,
 * upper bounds may be +inf, and lo == up marks a fixed column.
 */
struct Problem {
  int m = 0;  // rows
  int n = 0;  // columns
  std::vector<double> a;   // m*n, row-major
  std::vector<double> b;   // m
  std::vector<double> c;   // n
  std::vector<double> lo;  // n
  std::vector<double> up;  // n
};

/** Simplex working state over the reduced system B^-1 A. `t` holds the
 * reduced matrix (basic columns are unit vectors), `xb` the basic values,
 * `basis[i]` the column basic in row i, and `at_upper[j]` whether nonbasic
 * column j currently sits at its upper bound (else lower).
 */
struct Tableau {
  int m = 0;
  int n = 0;
  std::vector<double> t;            // m*n
  std::vector<double> xb;           // m
  std::vector<int> basis;           // m
  std::vector<unsigned char> at_upper;  // n
};

struct Result {
  Status status = Status::optimal;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
};

/** Bounded-variable primal simplex on an already reduced tableau.
 * Entering rule: most negative reduced cost (Dantzig), lowest index on ties;
 * a Bland fallback engages after prolonged degenerate stalling so the method
 * always terminates. Leaving rule: tightest ratio, then largest pivot
 * magnitude, then lowest basic column index. Fully deterministic.
 *
 * On return the tableau holds the final basis; use extract() for x.
 */
Status primal_simplex(Tableau& tab, const Problem& p, int max_iterations,
                      int* iterations_out);

/// Reads the full solution vector out of a solved tableau.
std::vector<double> extract(const Tableau& tab, const Problem& p);

/** Builds the reduced tableau for a caller-supplied starting basis by
 * Gauss-Jordan elimination on the basic columns (partial pivoting among the
 * uneliminated rows). The implied starting point must be feasible.
 */
Tableau build_tableau(const Problem& p, const std::vector<int>& basis);

/** Convenience driver: phase 1 with artificial columns when no basis is
 * supplied, then phase 2. Used by tests and small standalone models; the
 * scheduling hot path builds its tableau directly instead.
 */
Result solve(const Problem& p, const std::vector<int>* initial_basis = nullptr,
             int max_iterations = 0);

}  // namespace hzn::lp
