#pragma once

#include <gmpxx.h>

#include <vector>

namespace plap {

/// minimize objective . x  subject to  rows x = rhs,  x >= 0, in exact
/// rational arithmetic.
struct LinearProgram {
  int num_vars = 0;
  std::vector<std::vector<mpq_class>> rows;
  std::vector<mpq_class> rhs;
  std::vector<mpq_class> objective;

  /// Appends an equality row; `coeffs` has num_vars entries.
  void add_equality(std::vector<mpq_class> coeffs, mpq_class value);
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  mpq_class value;
  std::vector<mpq_class> x;
};

/// Two-phase dense tableau simplex with Bland's rule (no cycling).
LpResult solve_lp(const LinearProgram& lp);

}  // namespace plap
