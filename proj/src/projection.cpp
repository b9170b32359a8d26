#include "menurec/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "menurec/core.hpp"
#include "menurec/error.hpp"
#include "menurec/lp.hpp"

#include <Eigen/Dense>

namespace menurec {
namespace {

// ||P a|| with P the projector onto the sum-zero subspace.
double affine_norm(std::span<const double> a) {
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
  double s = 0.0;
  for (double v : a) s += (v - mean) * (v - mean);
  return std::sqrt(s);
}

}  // namespace

SetDescriptor::SetDescriptor(std::size_t n) : n_(n), floors_(n, 0.0) {
  if (n == 0) throw InvalidInput("set dimension must be positive");
}

SetDescriptor SetDescriptor::simplex(std::size_t n) { return SetDescriptor(n); }

SetDescriptor SetDescriptor::smoothed_simplex(double phi, std::size_t n) {
  const SmoothedSimplex params(phi, n);
  SetDescriptor set(n);
  const double floor = params.floor();
  const double scale = 1.0 - phi * static_cast<double>(n) / static_cast<double>(n - 1);
  if (scale > 1e-15) {
    set.with_uniform_floor(floor);
  } else if (scale < -1e-15) {
    // The hull is a reflected simplex: every coordinate sits below the floor.
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      set.add_halfspace(std::move(e), floor);
    }
  } else {
    set.with_uniform_floor(1.0 / static_cast<double>(n));
  }
  return set;
}

SetDescriptor& SetDescriptor::with_floors(std::vector<double> floors) {
  require_dimension(floors, n_, "with_floors");
  for (double f : floors)
    if (!(f >= 0.0)) throw InvalidInput("floors must be non-negative");
  floors_ = std::move(floors);
  return *this;
}

SetDescriptor& SetDescriptor::with_uniform_floor(double floor) {
  return with_floors(std::vector<double>(n_, floor));
}

SetDescriptor& SetDescriptor::with_ball(std::vector<double> center, double radius) {
  require_dimension(center, n_, "with_ball");
  if (!(radius >= 0.0)) throw InvalidInput("ball radius must be non-negative");
  ball_ = Ball{std::move(center), radius};
  return *this;
}

SetDescriptor& SetDescriptor::add_halfspace(std::vector<double> normal, double offset) {
  require_dimension(normal, n_, "add_halfspace");
  halfspaces_.push_back({std::move(normal), offset});
  return *this;
}

double SetDescriptor::max_violation(std::span<const double> x) const {
  require_dimension(x, n_, "max_violation");
  double v = std::abs(std::accumulate(x.begin(), x.end(), 0.0) - 1.0);
  for (std::size_t i = 0; i < n_; ++i) v = std::max(v, floors_[i] - x[i]);
  if (ball_) v = std::max(v, l2_distance(x, ball_->center) - ball_->radius);
  for (const auto& h : halfspaces_) v = std::max(v, dot(h.normal, x) - h.offset);
  return std::max(v, 0.0);
}

bool SetDescriptor::contains(std::span<const double> x, double tol) const {
  return max_violation(x) <= tol;
}

SetDescriptor SetDescriptor::shrunk_toward(std::span<const double> center, double xi) const {
  require_dimension(center, n_, "shrunk_toward");
  if (!(xi >= 0.0 && xi <= 1.0)) throw InvalidInput("shrink factor must lie in [0,1]");
  SetDescriptor out(n_);
  for (std::size_t i = 0; i < n_; ++i) out.floors_[i] = (1.0 - xi) * floors_[i] + xi * center[i];
  if (ball_) {
    std::vector<double> c(n_);
    for (std::size_t i = 0; i < n_; ++i) c[i] = (1.0 - xi) * ball_->center[i] + xi * center[i];
    out.ball_ = Ball{std::move(c), (1.0 - xi) * ball_->radius};
  }
  for (const auto& h : halfspaces_)
    out.halfspaces_.push_back({h.normal, (1.0 - xi) * h.offset + xi * dot(h.normal, center)});
  return out;
}

bool SetDescriptor::is_structurally_inside(const SetDescriptor& outer) const {
  constexpr double tol = 1e-12;
  if (outer.n_ != n_) return false;
  for (std::size_t i = 0; i < n_; ++i)
    if (floors_[i] < outer.floors_[i] - tol) return false;
  if (outer.ball_) {
    if (!ball_) return false;
    if (l2_distance(ball_->center, outer.ball_->center) + ball_->radius >
        outer.ball_->radius + tol)
      return false;
  }
  for (const auto& oh : outer.halfspaces_) {
    const bool implied = std::any_of(halfspaces_.begin(), halfspaces_.end(), [&](const Halfspace& h) {
      return h.offset <= oh.offset + tol && linf_distance(h.normal, oh.normal) <= tol;
    });
    if (!implied) return false;
  }
  return true;
}

std::vector<double> project_to_floored_simplex(std::span<const double> x,
                                               std::span<const double> floors) {
  const std::size_t n = x.size();
  require_dimension(floors, n, "project_to_floored_simplex");
  const double mass = 1.0 - std::accumulate(floors.begin(), floors.end(), 0.0);
  if (mass < -1e-12) throw InfeasibleSet("floors sum to more than one");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - floors[i];
  // Sort-based projection onto {y >= 0, sum y = mass}.
  std::vector<double> s = y;
  std::sort(s.begin(), s.end(), std::greater<>());
  double acc = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += s[i];
    const double t = (acc - std::max(mass, 0.0)) / static_cast<double>(i + 1);
    if (i + 1 == n || s[i + 1] <= t) {
      theta = t;
      break;
    }
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(y[i] - theta, 0.0) + floors[i];
  return out;
}

namespace {

// Dykstra can stall a hair outside a sharp vertex. Slides the iterate toward
// the Chebyshev center just far enough to be feasible; throws when the gap is
// too large to be numerical.
std::vector<double> finish_inside(const std::vector<double>& cur, const SetDescriptor& set,
                                  double tol) {
  const double viol = set.max_violation(cur);
  if (viol > 1e-3) throw InfeasibleSet("projection did not reach the set (empty intersection?)");
  if (set.ball()) return cur;  // ball sets are solved to the bisection resolution
  InscribedBall ball;
  try {
    ball = inscribed_ball(set);
  } catch (const InfeasibleSet&) {
    throw InfeasibleSet("projection did not reach the set (empty intersection?)");
  }
  if (!(ball.radius > 0.0))
    throw InfeasibleSet("projection did not reach the set (set has no interior)");
  const std::size_t n = cur.size();
  std::vector<double> y(n);
  auto at = [&](double t) {
    for (std::size_t i = 0; i < n; ++i) y[i] = cur[i] + t * (ball.center[i] - cur[i]);
    return set.max_violation(y);
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (at(mid) <= tol * 1e-3 ? hi : lo) = mid;
  }
  at(hi);
  return y;
}

// Lawson-Hanson non-negative least squares: min |E u - f| over u >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& f) {
  const Eigen::Index m = E.cols();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  const double tol = 1e-12 * std::max(1.0, E.cwiseAbs().maxCoeff());
  auto solve_passive = [&](Eigen::VectorXd& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < m; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd Ep(E.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) Ep.col(static_cast<Eigen::Index>(c)) = E.col(idx[c]);
    const Eigen::VectorXd sp = Ep.colPivHouseholderQr().solve(f);
    s.setZero(m);
    for (std::size_t c = 0; c < idx.size(); ++c) s[idx[c]] = sp[static_cast<Eigen::Index>(c)];
  };
  Eigen::VectorXd s(m);
  for (Eigen::Index outer = 0; outer < 3 * m + 10; ++outer) {
    const Eigen::VectorXd w = E.transpose() * (f - E * u);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < m; ++j)
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best < 0) break;
    passive[best] = true;
    for (Eigen::Index inner = 0; inner < 3 * m + 10; ++inner) {
      solve_passive(s);
      double alpha = 1.0;
      bool feasible = true;
      for (Eigen::Index j = 0; j < m; ++j)
        if (passive[j] && s[j] <= tol) {
          feasible = false;
          alpha = std::min(alpha, u[j] / (u[j] - s[j]));
        }
      if (feasible) break;
      u += alpha * (s - u);
      for (Eigen::Index j = 0; j < m; ++j)
        if (passive[j] && u[j] <= tol) {
          passive[j] = false;
          u[j] = 0.0;
        }
    }
    u = s;
  }
  return u;
}

// Exact projection onto a polyhedral set as a least-distance program: with
// y = x_p + w on the plane sum y = 1, minimize |w| subject to
// (a_j - mean(a_j) 1) . w <= b_j - a_j . x_p, solved by NNLS on the dual.
std::optional<std::vector<double>> project_polyhedral(std::span<const double> x,
                                                      const SetDescriptor& set) {
  const std::size_t n = set.dimension();
  std::vector<double> xp(x.begin(), x.end());
  const double shift = (std::accumulate(xp.begin(), xp.end(), 0.0) - 1.0) / static_cast<double>(n);
  for (double& v : xp) v -= shift;

  std::vector<std::pair<std::vector<double>, double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> a(n, 0.0);
    a[i] = -1.0;
    rows.emplace_back(std::move(a), -set.floors()[i]);
  }
  for (const auto& h : set.halfspaces()) rows.emplace_back(h.normal, h.offset);

  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(n);
  // LDP in the form G w >= h: G = -A_centered, h = -(b - a . x_p).
  Eigen::MatrixXd E(d + 1, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& [a, b] = rows[static_cast<std::size_t>(j)];
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    double ax = 0.0;
    for (std::size_t i = 0; i < n; ++i) ax += a[i] * xp[i];
    // Normalize each row so the tolerances mean the same thing everywhere.
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += (a[i] - mean) * (a[i] - mean);
    norm = std::sqrt(norm);
    if (norm < 1e-14) {
      if (b - ax < -1e-12) return std::nullopt;  // constant constraint that fails
      E.col(j).setZero();
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) E(static_cast<Eigen::Index>(i), j) = -(a[i] - mean) / norm;
    E(d, j) = -(b - ax) / norm;
  }
  Eigen::VectorXd f = Eigen::VectorXd::Zero(d + 1);
  f[d] = 1.0;
  const Eigen::VectorXd u = nnls(E, f);
  const Eigen::VectorXd r = E * u - f;
  if (std::abs(r[d]) < 1e-12) return std::nullopt;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = xp[i] - r[static_cast<Eigen::Index>(i)] / r[d];
  return y;
}

}  // namespace

std::vector<double> project_to_set(std::span<const double> x, const SetDescriptor& set,
                                   const ProjectionOptions& options) {
  const std::size_t n = set.dimension();
  require_dimension(x, n, "project_to_set");
  const auto& floors = set.floors();
  if (std::accumulate(floors.begin(), floors.end(), 0.0) > 1.0 + 1e-12)
    throw InfeasibleSet("floors sum to more than one");
  if (set.contains(x, 1e-12)) return {x.begin(), x.end()};

  // Projection onto everything except the ball.
  auto base = [&](std::span<const double> p) {
    if (set.halfspaces().empty()) return project_to_floored_simplex(p, floors);
    auto y = project_polyhedral(p, set);
    if (!y) throw InfeasibleSet("projection onto an empty set");
    return *y;
  };

  std::vector<double> y = base(x);
  if (const auto& ball = set.ball()) {
    // KKT: the projection is base((x + mu c) / (1 + mu)) for the smallest
    // mu >= 0 that lands inside the ball.
    auto dist = [&](const std::vector<double>& p) { return l2_distance(p, ball->center); };
    auto at = [&](double mu) {
      std::vector<double> z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = (x[i] + mu * ball->center[i]) / (1.0 + mu);
      return base(z);
    };
    if (dist(y) > ball->radius) {
      const auto limit = base(ball->center);
      if (dist(limit) > ball->radius + options.feasibility_tolerance)
        throw InfeasibleSet("ball does not meet the polyhedral part");
      double lo = 0.0, hi = 1.0;
      while (dist(at(hi)) > ball->radius && hi < 1e12) {
        lo = hi;
        hi *= 4.0;
      }
      for (int it = 0; it < 100 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dist(at(mid)) > ball->radius ? lo : hi) = mid;
      }
      y = hi >= 1e12 ? limit : at(hi);
    }
  }
  if (set.max_violation(y) > options.feasibility_tolerance * 1e-3)
    y = finish_inside(y, set, options.feasibility_tolerance);
  return y;
}

InscribedBall inscribed_ball(const SetDescriptor& set) {
  if (set.ball()) throw InvalidInput("inscribed_ball does not support ball constraints");
  const std::size_t n = set.dimension();
  const double coord_norm = std::sqrt(1.0 - 1.0 / static_cast<double>(n));
  LinearProgram lp;
  lp.num_vars = n + 1;  // x, then r
  lp.objective.assign(n + 1, 0.0);
  lp.objective[n] = 1.0;
  std::vector<double> row(n + 1, 1.0);
  row[n] = 0.0;
  lp.add(row, Relation::equal, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> r(n + 1, 0.0);
    r[j] = 1.0;
    r[n] = -coord_norm;
    lp.add(std::move(r), Relation::greater_equal, set.floors()[j]);
  }
  for (const auto& h : set.halfspaces()) {
    std::vector<double> r(h.normal);
    r.push_back(affine_norm(h.normal));
    lp.add(std::move(r), Relation::less_equal, h.offset);
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::infeasible) throw InfeasibleSet("set is empty");
  if (sol.status != LpStatus::optimal) throw InternalError("inscribed-ball LP failed");
  InscribedBall out;
  out.center.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
  // LP round-off can leave the center a hair off the plane sum x = 1.
  double total = 0.0;
  for (double& v : out.center) total += (v = std::max(v, 0.0));
  for (double& v : out.center) v /= total;
  out.radius = sol.x[n];
  return out;
}

}  // namespace menurec
