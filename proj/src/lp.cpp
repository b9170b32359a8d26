#include "menurec/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "menurec/error.hpp"

namespace menurec {
namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  // Row `rows_` is the objective row; column `cols_` is the right-hand side.
  double& obj(std::size_t c) { return at(rows_, c); }
  double& rhs(std::size_t r) { return at(r, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double factor = at(r, pc);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= factor * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  void drop_row(std::size_t r) {
    // Moves the objective row and later rows up by one.
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + 1)),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (cols_ + 1)));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

// Maximizes the objective row (stored as -reduced costs). Columns at or beyond
// `allowed_cols` never enter.
LpStatus run_simplex(Tableau& t, std::size_t allowed_cols, const LpOptions& opt) {
  std::size_t degenerate_streak = 0;
  for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
    const bool bland = degenerate_streak > 50;
    std::size_t enter = allowed_cols;
    double best = -opt.pivot_tolerance;
    for (std::size_t c = 0; c < allowed_cols; ++c) {
      const double v = t.obj(c);
      if (v < best) {
        enter = c;
        if (bland) break;
        best = v;
      }
    }
    if (enter == allowed_cols) return LpStatus::optimal;

    std::size_t leave = t.rows();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= opt.pivot_tolerance) continue;
      const double ratio = t.rhs(r) / a;
      if (ratio < best_ratio - 1e-14 ||
          (ratio <= best_ratio + 1e-14 && leave < t.rows() && t.basis()[r] < t.basis()[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave == t.rows()) return LpStatus::unbounded;
    degenerate_streak = best_ratio <= 1e-14 ? degenerate_streak + 1 : 0;
    t.pivot(leave, enter);
  }
  return LpStatus::iteration_limit;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opt) {
  const std::size_t n = lp.num_vars;
  if (lp.objective.size() != n) throw InvalidInput("lp objective size mismatch");
  const std::size_t m = lp.constraints.size();

  // Normalize rows to non-negative right-hand sides.
  struct Row {
    std::vector<double> a;
    Relation rel;
    double b;
  };
  std::vector<Row> rows;
  rows.reserve(m);
  std::size_t num_slack = 0, num_art = 0;
  for (const auto& c : lp.constraints) {
    if (c.coeffs.size() != n) throw InvalidInput("lp constraint size mismatch");
    Row row{c.coeffs, c.relation, c.rhs};
    if (row.b < 0.0) {
      for (double& v : row.a) v = -v;
      row.b = -row.b;
      if (row.rel == Relation::less_equal) row.rel = Relation::greater_equal;
      else if (row.rel == Relation::greater_equal) row.rel = Relation::less_equal;
    }
    if (row.rel != Relation::equal) ++num_slack;
    if (row.rel != Relation::less_equal) ++num_art;
    rows.push_back(std::move(row));
  }

  const std::size_t art_begin = n + num_slack;
  const std::size_t cols = art_begin + num_art;
  Tableau t(m, cols);
  std::size_t slack = n, art = art_begin;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) t.at(r, j) = rows[r].a[j];
    t.rhs(r) = rows[r].b;
    switch (rows[r].rel) {
      case Relation::less_equal:
        t.at(r, slack) = 1.0;
        t.basis()[r] = slack++;
        break;
      case Relation::greater_equal:
        t.at(r, slack++) = -1.0;
        t.at(r, art) = 1.0;
        t.basis()[r] = art++;
        break;
      case Relation::equal:
        t.at(r, art) = 1.0;
        t.basis()[r] = art++;
        break;
    }
  }

  LpSolution out;
  // Phase 1: maximize -sum(artificials).
  if (num_art > 0) {
    for (std::size_t c = art_begin; c < cols; ++c) t.obj(c) = 1.0;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (t.basis()[r] < art_begin) continue;
      for (std::size_t c = 0; c <= cols; ++c) t.obj(c) -= t.at(r, c);
    }
    const LpStatus s1 = run_simplex(t, cols, opt);
    if (s1 == LpStatus::iteration_limit) {
      out.status = s1;
      return out;
    }
    double scale = 1.0;
    for (const auto& row : rows) scale = std::max(scale, row.b);
    if (t.obj(cols) < -opt.feasibility_tolerance * scale) {
      out.status = LpStatus::infeasible;
      return out;
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (std::size_t r = 0; r < t.rows();) {
      if (t.basis()[r] < art_begin) {
        ++r;
        continue;
      }
      std::size_t pc = art_begin;
      double best = opt.pivot_tolerance * 100;
      for (std::size_t c = 0; c < art_begin; ++c) {
        if (std::abs(t.at(r, c)) > best) {
          best = std::abs(t.at(r, c));
          pc = c;
        }
      }
      if (pc == art_begin) {
        t.drop_row(r);
      } else {
        t.pivot(r, pc);
        ++r;
      }
    }
  }

  // Phase 2 objective row: -c (maximize) with basic columns eliminated.
  const double sign = lp.maximize ? 1.0 : -1.0;
  for (std::size_t c = 0; c <= cols; ++c) t.obj(c) = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.obj(j) = -sign * lp.objective[j];
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const std::size_t b = t.basis()[r];
    const double f = t.obj(b);
    if (f == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) t.obj(c) -= f * t.at(r, c);
  }
  const LpStatus s2 = run_simplex(t, art_begin, opt);
  out.status = s2;
  if (s2 != LpStatus::optimal) return out;

  out.x.assign(n, 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r)
    if (t.basis()[r] < n) out.x[t.basis()[r]] = std::max(0.0, t.rhs(r));
  double value = 0.0;
  for (std::size_t j = 0; j < n; ++j) value += lp.objective[j] * out.x[j];
  out.objective = value;
  return out;
}

}  // namespace menurec
