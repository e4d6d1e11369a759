#include "plap/rational_simplex.hpp"

#include <stdexcept>

namespace plap {

void LinearProgram::add_equality(std::vector<mpq_class> coeffs, mpq_class value) {
  if (static_cast<int>(coeffs.size()) != num_vars)
    throw std::invalid_argument("row length does not match num_vars");
  rows.push_back(std::move(coeffs));
  rhs.push_back(std::move(value));
}

namespace {

// Tableau rows [a_1 .. a_cols | b]; basis[i] is the basic column of row i.
class Tableau {
 public:
  Tableau(std::vector<std::vector<mpq_class>> rows, std::vector<int> basis, int cols)
      : rows_(std::move(rows)), basis_(std::move(basis)), cols_(cols) {}

  // Minimizes cost over the current feasible basis, only entering columns
  // with allowed[j]. Returns false when unbounded.
  bool optimize(const std::vector<mpq_class>& cost, const std::vector<char>& allowed) {
    while (true) {
      std::vector<mpq_class> reduced = reduced_costs(cost);
      int enter = -1;
      for (int j = 0; j < cols_; ++j) {
        if (allowed[j] && reduced[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      mpq_class best_ratio;
      for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
        const mpq_class& a = rows_[i][enter];
        if (a <= 0) continue;
        mpq_class ratio = rows_[i][cols_] / a;
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(int r, int c) {
    mpq_class inv = 1 / rows_[r][c];
    for (auto& v : rows_[r]) v *= inv;
    for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
      if (i == r || rows_[i][c] == 0) continue;
      mpq_class factor = rows_[i][c];
      for (int j = 0; j <= cols_; ++j) rows_[i][j] -= factor * rows_[r][j];
    }
    basis_[r] = c;
  }

  mpq_class objective(const std::vector<mpq_class>& cost) const {
    mpq_class v = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) v += cost[basis_[i]] * rows_[i][cols_];
    return v;
  }

  std::vector<mpq_class> solution() const {
    std::vector<mpq_class> x(cols_, 0);
    for (std::size_t i = 0; i < rows_.size(); ++i) x[basis_[i]] = rows_[i][cols_];
    return x;
  }

  std::vector<std::vector<mpq_class>>& rows() { return rows_; }
  std::vector<int>& basis() { return basis_; }

 private:
  std::vector<mpq_class> reduced_costs(const std::vector<mpq_class>& cost) const {
    std::vector<mpq_class> reduced(cost.begin(), cost.begin() + cols_);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const mpq_class& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (int j = 0; j < cols_; ++j) reduced[j] -= cb * rows_[i][j];
    }
    return reduced;
  }

  std::vector<std::vector<mpq_class>> rows_;
  std::vector<int> basis_;
  int cols_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const int n = lp.num_vars;
  const int m = static_cast<int>(lp.rows.size());
  if (static_cast<int>(lp.rhs.size()) != m)
    throw std::invalid_argument("rhs size does not match row count");
  if (static_cast<int>(lp.objective.size()) != n)
    throw std::invalid_argument("objective size does not match num_vars");

  // Phase 1: one artificial per row, rows flipped so that rhs >= 0.
  const int cols = n + m;
  std::vector<std::vector<mpq_class>> rows(m, std::vector<mpq_class>(cols + 1, 0));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    bool flip = lp.rhs[i] < 0;
    for (int j = 0; j < n; ++j) rows[i][j] = flip ? mpq_class(-lp.rows[i][j]) : lp.rows[i][j];
    rows[i][n + i] = 1;
    rows[i][cols] = flip ? mpq_class(-lp.rhs[i]) : lp.rhs[i];
    basis[i] = n + i;
  }
  Tableau tab(std::move(rows), std::move(basis), cols);

  std::vector<mpq_class> phase1_cost(cols, 0);
  for (int j = n; j < cols; ++j) phase1_cost[j] = 1;
  std::vector<char> all(cols, 1);
  tab.optimize(phase1_cost, all);

  LpResult result;
  if (tab.objective(phase1_cost) != 0) {
    result.status = LpStatus::infeasible;
    return result;
  }

  // Drive zero-level artificials out of the basis; rows that cannot pivot are
  // redundant and dropped.
  for (int i = 0; i < static_cast<int>(tab.rows().size());) {
    if (tab.basis()[i] < n) {
      ++i;
      continue;
    }
    int col = -1;
    for (int j = 0; j < n; ++j)
      if (tab.rows()[i][j] != 0) {
        col = j;
        break;
      }
    if (col >= 0) {
      tab.pivot(i, col);
      ++i;
    } else {
      tab.rows().erase(tab.rows().begin() + i);
      tab.basis().erase(tab.basis().begin() + i);
    }
  }

  std::vector<mpq_class> phase2_cost(cols, 0);
  for (int j = 0; j < n; ++j) phase2_cost[j] = lp.objective[j];
  std::vector<char> originals(cols, 0);
  for (int j = 0; j < n; ++j) originals[j] = 1;
  if (!tab.optimize(phase2_cost, originals)) {
    result.status = LpStatus::unbounded;
    return result;
  }
  result.status = LpStatus::optimal;
  result.value = tab.objective(phase2_cost);
  auto x = tab.solution();
  result.x.assign(x.begin(), x.begin() + n);
  return result;
}

}  // namespace plap
