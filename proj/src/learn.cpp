#include "menurec/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "menurec/error.hpp"

namespace menurec {

Menu random_menu(Rng& rng, std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw InvalidInput("menu size must satisfy 1 <= k <= n");
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.index(n - i)]);
  all.resize(k);
  return Menu(std::move(all), n);
}

std::size_t burn_in_length(std::size_t horizon, double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw InvalidInput("burn-in exponent must lie in [0,1]");
  const double len = std::ceil(std::pow(static_cast<double>(horizon), c) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(len), 1, std::max<std::size_t>(horizon, 1));
}

std::size_t burn_in(Episode& episode, std::size_t rounds) {
  const std::size_t start = episode.rounds_played() + 1;
  const std::size_t todo = std::min(rounds, episode.remaining());
  for (std::size_t r = 0; r < todo; ++r)
    episode.play(random_menu(episode.algorithm_rng(), episode.n(), episode.k()));
  episode.annotate_stage({"burn_in", start, todo, {}, 0.0});
  return todo;
}

QueryPlan make_query_plan(std::size_t n, std::size_t k) {
  if (n < 2) throw InvalidInput("query needs at least two items");
  if (k < 2 || k > n) throw InvalidInput("query needs 2 <= k <= n");
  QueryPlan plan;
  const std::size_t width = k - 1;
  for (std::size_t first = 1; first < n; first += width) {
    std::vector<std::size_t> cell;
    for (std::size_t i = first; i < std::min(n, first + width); ++i) cell.push_back(i);
    std::size_t pad = 0;
    for (std::size_t filler = 1; cell.size() < width; ++filler) {
      cell.push_back(filler);
      ++pad;
    }
    plan.cells.push_back(std::move(cell));
    plan.padding_per_cell.push_back(pad);
  }
  return plan;
}

std::size_t query_min_cell_rounds(std::size_t n, double alpha, double delta) {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0,1)");
  return static_cast<std::size_t>(
      std::ceil(std::log(2.0 * static_cast<double>(n) / delta) / (2.0 * alpha * alpha) - 1e-9));
}

double query_alpha(std::size_t n, std::size_t k, std::size_t t_query, double delta) {
  const std::size_t cells = make_query_plan(n, k).cells.size();
  const std::size_t per_cell = t_query / cells;
  if (per_cell == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::log(2.0 * static_cast<double>(n) / delta) /
                   (2.0 * static_cast<double>(per_cell)));
}

std::vector<double> ModelEstimate::clamped(double floor) const {
  std::vector<double> out = tilde_f;
  for (double& x : out) x = std::max(x, floor);
  return out;
}

ModelEstimate query_scores(Episode& episode, std::size_t t_query, double alpha, double delta) {
  const std::size_t n = episode.n();
  const QueryPlan plan = make_query_plan(n, episode.k());
  const std::size_t cells = plan.cells.size();
  const std::size_t need = query_min_cell_rounds(n, alpha, delta);
  if (t_query / cells < need)
    throw InfeasibleParameters("t_query too small: each cell needs " + std::to_string(need) +
                               " rounds for the requested alpha and delta");
  if (t_query > episode.remaining())
    throw InfeasibleParameters("t_query exceeds the remaining horizon");

  ModelEstimate est;
  est.center = episode.memory_vector();
  est.alpha = alpha;
  est.delta = delta;
  est.rounds = t_query;
  const std::size_t start = episode.rounds_played() + 1;

  std::vector<Menu> menus;
  std::vector<std::vector<std::size_t>> owned(cells);  // non-padding items of each cell
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<std::size_t> items = plan.cells[c];
    owned[c].assign(items.begin(), items.end() - static_cast<std::ptrdiff_t>(plan.padding_per_cell[c]));
    items.push_back(plan.pivot);
    menus.emplace_back(std::move(items), n);
  }

  std::vector<double> pivot_count(cells, 0.0);
  std::vector<double> count(n, 0.0);
  for (std::size_t r = 0; r < t_query; ++r) {
    const std::size_t c = r % cells;
    const auto out = episode.play(menus[c]);
    if (out.chosen == plan.pivot) {
      pivot_count[c] += 1.0;
    } else if (std::find(owned[c].begin(), owned[c].end(), out.chosen) != owned[c].end()) {
      count[out.chosen] += 1.0;
    }
  }

  std::vector<double> hat(n, 0.0);
  hat[plan.pivot] = 1.0;
  for (std::size_t c = 0; c < cells; ++c)
    for (std::size_t i : owned[c]) hat[i] = std::max(count[i], 0.5) / std::max(pivot_count[c], 0.5);
  const double top = *std::max_element(hat.begin(), hat.end());
  for (double& x : hat) x /= top;
  est.tilde_f = std::move(hat);
  episode.annotate_stage({"query", start, t_query, est.tilde_f, alpha});
  return est;
}

std::vector<double> sum_zero_sphere_direction(std::size_t n, Rng& rng) {
  if (n < 2) throw InvalidInput("sum-zero sphere needs n >= 2");
  std::vector<double> u(n);
  double norm = 0.0;
  while (norm < 1e-12) {
    for (double& x : u) x = rng.normal();
    const double mean = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(n);
    norm = 0.0;
    for (double& x : u) {
      x -= mean;
      norm += x * x;
    }
    norm = std::sqrt(norm);
  }
  for (double& x : u) x /= norm;
  return u;
}

Rcfkm::Rcfkm(SetDescriptor set, std::size_t horizon, RcfkmOptions options,
             std::optional<std::vector<double>> start)
    : set_(std::move(set)), horizon_(std::max<std::size_t>(horizon, 1)), options_(options) {
  if (set_.dimension() < 2) throw InvalidInput("RC-FKM needs dimension >= 2");
  if (set_.ball()) throw InvalidInput("RC-FKM sets must be polyhedral");
  const double h = static_cast<double>(horizon_);
  eta_ = options_.eta_scale * std::pow(h, -0.75);
  delta_ = options_.delta_scale * std::pow(h, -0.25);
  rebuild_geometry();
  iterate_ = start ? project_to_set(*start, shrunk_) : ball_.center;
  emitted_ = iterate_;
  u_.assign(set_.dimension(), 0.0);
}

void Rcfkm::rebuild_geometry() {
  ball_ = inscribed_ball(set_);
  if (ball_.radius <= 0.0) {
    delta_eff_ = 0.0;
    xi_ = 0.0;
  } else {
    const double cap = std::clamp(options_.max_xi, 0.0, 1.0 - options_.interior_margin);
    delta_eff_ = std::min(delta_, ball_.radius * cap);
    xi_ = delta_eff_ / ball_.radius;
  }
  shrunk_ = set_.shrunk_toward(ball_.center, xi_);
}

const std::vector<double>& Rcfkm::next(Rng& rng) {
  if (pending_) return emitted_;
  const std::size_t n = dimension();
  u_ = delta_eff_ > 0.0 ? sum_zero_sphere_direction(n, rng) : std::vector<double>(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) emitted_[i] = iterate_[i] + delta_eff_ * u_[i];
  pending_ = true;
  return emitted_;
}

void Rcfkm::update(double reward) {
  if (!pending_) throw InvalidInput("RC-FKM update without a pending action");
  if (!(reward >= 0.0 && reward <= 1.0)) {
    ++clamped_;
    reward = std::isnan(reward) ? 0.0 : std::clamp(reward, 0.0, 1.0);
  }
  pending_ = false;
  ++steps_;
  if (delta_eff_ <= 0.0) return;
  const std::size_t n = dimension();
  const double d = static_cast<double>(n - 1);
  const double centered = options_.baseline ? reward - baseline_ : reward;
  const double scale = eta_ * d / delta_eff_ * centered;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = iterate_[i] + scale * u_[i];
  iterate_ = shrunk_.contains(y, 1e-12) ? std::move(y) : project_to_set(y, shrunk_);
  if (options_.baseline) {
    const double rate = std::max(1.0 / static_cast<double>(steps_ + 1), 0.01);
    baseline_ += rate * (reward - baseline_);
  }
}

void Rcfkm::update(double reward, const SetDescriptor& next_set) {
  update(reward);
  contract_to(next_set);
}

void Rcfkm::contract_to(const SetDescriptor& next_set) {
  if (next_set.ball()) throw InvalidInput("RC-FKM sets must be polyhedral");
  if (!next_set.is_structurally_inside(set_))
    throw ContractViolation("RC-FKM action set must be contained in the previous set");
  set_ = next_set;
  rebuild_geometry();
  if (!shrunk_.contains(iterate_, 1e-12)) iterate_ = project_to_set(iterate_, shrunk_);
  if (pending_)
    for (std::size_t i = 0; i < dimension(); ++i) emitted_[i] = iterate_[i] + delta_eff_ * u_[i];
}

Exp3::Exp3(std::size_t arms, std::size_t horizon, Exp3Options options) : losses_(arms, 0.0) {
  if (arms == 0) throw InvalidInput("EXP3 needs at least one arm");
  const double k = static_cast<double>(arms);
  const double p = static_cast<double>(std::max<std::size_t>(horizon, 1));
  eta_ = options.eta > 0.0 ? options.eta : std::sqrt(2.0 * std::log(k) / (k * p));
  mix_ = options.mix >= 0.0 ? options.mix : std::min(0.05, std::sqrt(k * std::log(k) / p));
  if (mix_ > 1.0) throw InvalidInput("EXP3 mixing weight must be at most 1");
}

std::vector<double> Exp3::probabilities() const {
  const std::size_t k = arms();
  const double lo = *std::min_element(losses_.begin(), losses_.end());
  std::vector<double> p(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    p[i] = std::exp(-eta_ * (losses_[i] - lo));
    total += p[i];
  }
  for (double& x : p) x = (1.0 - mix_) * x / total + mix_ / static_cast<double>(k);
  return p;
}

std::vector<double> Exp3::estimated_rewards() const {
  std::vector<double> out(arms());
  for (std::size_t i = 0; i < arms(); ++i) out[i] = static_cast<double>(rounds_) - losses_[i];
  return out;
}

std::size_t Exp3::next(Rng& rng) {
  const auto p = probabilities();
  double u = rng.uniform();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (u < p[i]) return i;
    u -= p[i];
  }
  return p.size() - 1;
}

void Exp3::update(std::size_t arm, double reward) {
  if (arm >= arms()) throw InvalidInput("EXP3 arm out of range");
  if (!(reward >= 0.0 && reward <= 1.0)) {
    ++clamped_;
    reward = std::isnan(reward) ? 0.0 : std::clamp(reward, 0.0, 1.0);
  }
  const double p = probabilities()[arm];
  losses_[arm] += (1.0 - reward) / p;
  ++rounds_;
}

}  // namespace menurec
