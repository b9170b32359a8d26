#include "menurec/menus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "menurec/error.hpp"
#include "menurec/lp.hpp"

namespace menurec {
namespace {

void check_scores(std::span<const double> scores) {
  for (double f : scores)
    if (!(f > 0.0) || !std::isfinite(f)) throw InvalidModel("scores must be positive and finite");
}

void check_k(std::size_t k, std::size_t n) {
  if (k < 1 || k >= n) throw InvalidInput("menu size k must satisfy 1 <= k < n");
}

}  // namespace

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(c));
}

std::vector<Menu> all_menus(std::size_t n, std::size_t k, std::size_t cap) {
  if (k < 1 || k > n) throw InvalidInput("menu size k must satisfy 1 <= k <= n");
  if (binomial(n, k) > cap) throw ResourceLimit("too many menus to enumerate");
  std::vector<Menu> out;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    out.emplace_back(idx, n);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::vector<double> menu_times(std::span<const double> x, std::span<const double> scores,
                               std::size_t k) {
  require_dimension(scores, x.size(), "menu_times");
  check_scores(scores);
  check_k(k, x.size());
  std::vector<double> mu(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mu[i] = x[i] / scores[i];
    total += mu[i];
  }
  if (!(total > 0.0)) throw InvalidInput("item distribution has no mass");
  const double scale = static_cast<double>(k) / total;
  for (double& m : mu) m *= scale;
  return mu;
}

bool ird_contains(std::span<const double> x, std::span<const double> scores, std::size_t k) {
  const auto mu = menu_times(x, scores, k);
  return *std::max_element(mu.begin(), mu.end()) <= 1.0 + kIrdTolerance;
}

std::vector<double> menu_choice_probs(const Menu& menu, std::span<const double> scores) {
  std::vector<double> p(scores.size(), 0.0);
  double z = 0.0;
  for (std::size_t i : menu.items()) {
    if (i >= scores.size()) throw InvalidInput("menu item outside the score vector");
    z += scores[i];
  }
  for (std::size_t i : menu.items()) p[i] = scores[i] / z;
  return p;
}

bool ird_contains_oracle(std::span<const double> x, std::span<const double> scores,
                         std::size_t k) {
  const std::size_t n = x.size();
  require_dimension(scores, n, "ird_contains_oracle");
  if (n > kOracleMaxItems) throw ResourceLimit("IRD oracle enumerates menus only for n <= 12");
  check_scores(scores);
  check_k(k, n);
  const auto menus = all_menus(n, k);
  const std::size_t m = menus.size();
  // Variables: menu weights, then positive and negative residual slacks.
  LinearProgram lp;
  lp.num_vars = m + 2 * n;
  lp.maximize = false;
  lp.objective.assign(lp.num_vars, 0.0);
  for (std::size_t j = m; j < lp.num_vars; ++j) lp.objective[j] = 1.0;
  std::vector<double> ones(lp.num_vars, 0.0);
  std::fill(ones.begin(), ones.begin() + static_cast<std::ptrdiff_t>(m), 1.0);
  lp.add(std::move(ones), Relation::equal, 1.0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(lp.num_vars, 0.0));
  for (std::size_t c = 0; c < m; ++c) {
    const auto p = menu_choice_probs(menus[c], scores);
    for (std::size_t i = 0; i < n; ++i) rows[i][c] = p[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    rows[i][m + i] = 1.0;
    rows[i][m + n + i] = -1.0;
    lp.add(std::move(rows[i]), Relation::equal, x[i]);
  }
  const auto sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) throw InternalError("IRD oracle LP did not solve");
  return sol.objective <= kOracleTolerance;
}

ItemDistribution induced_item_distribution(const MenuDistribution& z,
                                           std::span<const double> scores) {
  std::vector<double> out(scores.size(), 0.0);
  for (const auto& mass : z.support()) {
    double sum = 0.0;
    for (std::size_t i : mass.menu.items()) {
      if (i >= scores.size()) throw InvalidInput("menu item outside the score vector");
      sum += scores[i];
    }
    for (std::size_t i : mass.menu.items()) out[i] += mass.prob * scores[i] / sum;
  }
  return ItemDistribution::normalized(std::move(out));
}

MenuConstruction build_menu_construction(std::span<const double> x,
                                         std::span<const double> scores, std::size_t k,
                                         double epsilon) {
  const std::size_t n = x.size();
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  auto remaining = menu_times(x, scores, k);
  if (*std::max_element(remaining.begin(), remaining.end()) > 1.0 + kIrdTolerance)
    throw NotRealizable("target lies outside the IRD set");

  const double stages_real =
      static_cast<double>(n) / (epsilon * static_cast<double>(k) * static_cast<double>(k));
  const auto stages = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(stages_real - 1e-9)));
  const double tau = 1.0 / static_cast<double>(stages);

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > 0.0) eligible.push_back(i);
  if (eligible.size() < k) throw NotRealizable("fewer than k items carry target mass");

  std::map<Menu, double> mass;
  double total = 0.0;
  std::vector<std::size_t> order = eligible;
  auto before = [&](std::size_t a, std::size_t b) {
    return remaining[a] > remaining[b] || (remaining[a] == remaining[b] && a < b);
  };
  for (std::size_t h = 0; h < stages; ++h) {
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), before);
    std::vector<std::size_t> items(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    double z = 0.0;
    for (std::size_t i : items) {
      z += scores[i];
      remaining[i] -= tau;
    }
    mass[Menu(std::move(items), n)] += z;
    total += z;
  }
  std::vector<MenuMass> support;
  support.reserve(mass.size());
  for (auto& [menu, w] : mass) support.push_back({menu, w / total});
  // Renormalize to absorb rounding in the division above.
  double s = 0.0;
  for (const auto& m : support) s += m.prob;
  for (auto& m : support) m.prob /= s;
  return {MenuDistribution(std::move(support)), stages};
}

MenuDistribution build_menu_distribution(std::span<const double> x,
                                         std::span<const double> scores, std::size_t k,
                                         double epsilon) {
  return build_menu_construction(x, scores, k, epsilon).distribution;
}

bool eird_contains_grid(std::span<const double> x, const PreferenceModel& model, std::size_t k,
                        std::span<const std::vector<double>> grid) {
  if (grid.empty()) throw InvalidInput("EIRD grid is empty");
  std::vector<double> f(model.n());
  for (const auto& v : grid) {
    model.scores_into(v, f);
    if (!ird_contains(x, f, k)) return false;
  }
  return true;
}

std::vector<std::vector<double>> menu_time_normals(std::span<const double> scores,
                                                   std::size_t k, double margin) {
  check_scores(scores);
  check_k(k, scores.size());
  const std::size_t n = scores.size();
  std::vector<std::vector<double>> out(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i][j] = -(1.0 - margin) / scores[j];
    out[i][i] += static_cast<double>(k) / scores[i];
  }
  return out;
}

}  // namespace menurec
