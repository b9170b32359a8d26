#pragma once

#include <cstddef>
#include <vector>

namespace menurec {

// Small dense linear programs: optimize c.x subject to rows and x >= 0.
// Two-phase tableau simplex, Dantzig pricing with a Bland fallback on
// degenerate stalls.

enum class Relation { less_equal, equal, greater_equal };

struct LpConstraint {
  std::vector<double> coeffs;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
};

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
  bool maximize = true;

  void add(std::vector<double> coeffs, Relation relation, double rhs) {
    constraints.push_back({std::move(coeffs), relation, rhs});
  }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

struct LpOptions {
  double pivot_tolerance = 1e-11;
  double feasibility_tolerance = 1e-9;
  std::size_t max_iterations = 100000;
};

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace menurec
