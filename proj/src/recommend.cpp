#include "menurec/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "menurec/error.hpp"
#include "menurec/menus.hpp"

namespace menurec {

namespace {

double pow_t(std::size_t horizon, double e) { return std::pow(static_cast<double>(horizon), e); }

std::size_t ceil_size(double x) {
  return static_cast<std::size_t>(std::max(0.0, std::ceil(x - 1e-9)));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigurationError(what);
}

void require_regime(bool ok, const Strictness& s, const std::string& what) {
  if (!ok && s.enforce_regime) throw ConfigurationError(what);
}

void require_gamma_matches(const Episode& ep, double c, const std::string& alg) {
  const double want = gamma_for(ep.horizon(), c);
  require(std::abs(ep.gamma() - want) <= 1e-9, alg + " expects gamma = 1 - T^(-c) = " +
                                                    format_number(want) + ", got " +
                                                    format_number(ep.gamma()));
}

double score_floor_for(double configured, const ClassMeta& meta) {
  if (configured > 0.0) return configured;
  return meta.lambda > 0.0 ? meta.lambda / 2.0 : 1e-3;
}

SetDescriptor with_menu_time_constraints(SetDescriptor base, const std::vector<double>& scores,
                                         std::size_t k, double margin) {
  for (auto& a : menu_time_normals(scores, k, margin)) base.add_halfspace(std::move(a), 0.0);
  return base;
}

// Snaps tiny negative entries produced by floating error back onto the simplex.
std::vector<double> clean_point(std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  double s = 0.0;
  for (double& v : y) {
    v = std::max(v, 0.0);
    s += v;
  }
  for (double& v : y) v /= s;
  return y;
}

// Converts targets to menu distributions under estimated scores, projecting
// onto the estimated IRD polytope when the menu-time test fails.
struct Realizer {
  std::size_t k;
  double eps;
  double margin;
  std::size_t fallbacks = 0;
  double max_mu = 0.0;

  MenuDistribution realize(std::span<const double> target, const std::vector<double>& scores,
                           std::vector<double>* used = nullptr) {
    std::vector<double> x = clean_point(target);
    auto mu = menu_times(x, scores, k);
    if (*std::max_element(mu.begin(), mu.end()) > 1.0 + kIrdTolerance) {
      ++fallbacks;
      const auto poly =
          with_menu_time_constraints(SetDescriptor::simplex(x.size()), scores, k, margin);
      x = clean_point(project_to_set(x, poly));
      mu = menu_times(x, scores, k);
    }
    max_mu = std::max(max_mu, *std::max_element(mu.begin(), mu.end()));
    if (used) *used = x;
    return build_menu_distribution(x, scores, k, eps);
  }
};

bool has_nonempty_interior(const SetDescriptor& s) {
  try {
    return inscribed_ball(s).radius > 1e-9;
  } catch (const InfeasibleSet&) {
    return false;
  }
}

}  // namespace

double gamma_for(std::size_t horizon, double c) { return 1.0 - pow_t(horizon, -c); }

Alg1Params Alg1Params::defaults(std::size_t horizon, double c) {
  Alg1Params p;
  p.c = c;
  p.rho = pow_t(horizon, -c / 4.0);
  p.beta = p.rho * p.rho;
  p.t_burn = ceil_size(pow_t(horizon, c));
  p.t_query = ceil_size(p.beta * pow_t(horizon, c));
  p.delta = 1.0 / (static_cast<double>(horizon) * static_cast<double>(horizon));
  return p;
}

Alg2Params Alg2Params::defaults(std::size_t horizon, double c, std::size_t k, const ClassMeta& meta) {
  Alg2Params p;
  p.c = c;
  p.y = 5.0 * c / 8.0;
  p.z = c / 2.0;
  p.rho = pow_t(horizon, -p.z);
  p.t_burn = ceil_size(pow_t(horizon, c));
  p.t_query = ceil_size(pow_t(horizon, c - p.y));
  p.t_step = ceil_size(pow_t(horizon, c - p.z));
  const double sigma = meta.sigma.value_or(1.0);
  p.phi = 4.0 * static_cast<double>(k) * meta.lambda * sigma * sigma;
  p.clamp_radius = meta.lambda * p.phi;
  p.delta = 1.0 / static_cast<double>(horizon);
  return p;
}

Alg3Params Alg3Params::defaults(std::size_t horizon, double gamma, std::size_t k,
                                const ClassMeta& meta, double alpha0) {
  Alg3Params p;
  p.alpha0 = alpha0;
  p.alpha = alpha0 * pow_t(horizon, -1.0 / 6.0);
  const double a4 = std::pow(p.alpha, 4.0);
  const double hold = std::ceil(4.0 / (a4 * (1.0 - gamma)) - 1e-9);
  const std::size_t cap = std::max<std::size_t>(1, horizon / 10);
  p.t_hold = std::max<std::size_t>(1, hold >= static_cast<double>(cap) ? cap
                                                                     : static_cast<std::size_t>(hold));
  const double sigma = meta.sigma.value_or(1.0);
  const double kk = static_cast<double>(k);
  p.phi = 2.0 * meta.lambda * kk * kk * kk * std::pow(sigma, 6.0);
  return p;
}

ExpPhiDiagnostics exp_phi_diagnostics(double lambda, double sigma, std::size_t k) {
  const double kk = static_cast<double>(k);
  const double s2 = sigma * sigma;
  return {1.0 - kk * lambda * s2, 1.0 / (2.0 * s2 * std::pow(kk, 4.0)),
          1.0 / (1.0 + 2.0 * lambda * std::pow(sigma, 6.0) * kk * kk * kk)};
}

Menu exp_phi_menu(std::size_t held, std::span<const double> memory, std::size_t k) {
  const std::size_t n = memory.size();
  if (held >= n) throw InvalidInput("held item out of range");
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < n; ++j)
    if (j != held) others.push_back(j);
  std::stable_sort(others.begin(), others.end(),
                   [&](std::size_t a, std::size_t b) { return memory[a] < memory[b]; });
  others.resize(k - 1);
  others.push_back(held);
  return Menu(std::move(others), n);
}

RunResult run_alg1(Episode& ep, const Alg1Params& p) {
  const ClassMeta& meta = ep.declared_class();
  const std::size_t n = ep.n(), k = ep.k(), horizon = ep.horizon();
  RunResult res;
  auto& diag = res.diagnostics;

  const bool lambda_ok = meta.lambda >= static_cast<double>(k * k) / static_cast<double>(n) - 1e-12;
  diag["regime_lambda_ok"] = lambda_ok ? 1.0 : 0.0;
  if (p.checks.strict) {
    require(meta.lipschitz.has_value(), "Algorithm 1 needs a model declared smooth");
    require(k >= 2, "Algorithm 1 needs k >= 2 for the query routine");
    require_gamma_matches(ep, p.c, "Algorithm 1");
    require(p.rho > 0.0 && p.construction_eps > 0.0, "Algorithm 1 needs rho > 0 and eps > 0");
  }
  require_regime(lambda_ok, p.checks, "Algorithm 1 assumes lambda >= k^2/n");

  const double floor = score_floor_for(p.score_floor, meta);
  const std::size_t cells = make_query_plan(n, k).cells.size();
  const std::size_t t_query = std::max(p.t_query, cells);
  const double delta = p.delta > 0.0 ? p.delta : 1.0 / static_cast<double>(horizon);
  const double alpha = query_alpha(n, k, t_query, delta);
  diag["alpha"] = alpha;
  diag["rho"] = p.rho;
  diag["beta"] = p.beta;
  diag["t_query"] = static_cast<double>(t_query);
  diag["t_burn"] = static_cast<double>(burn_in(ep, p.t_burn));

  Realizer realizer{k, p.construction_eps, p.mu_margin};
  SetDescriptor action = SetDescriptor::simplex(n);
  std::optional<Rcfkm> opt;
  std::vector<double> scores;
  std::size_t queries = 0, skipped = 0, opt_rounds = 0;
  const std::size_t opt_horizon = std::max<std::size_t>(1, horizon - std::min(horizon, ep.rounds_played() + t_query));

  while (!ep.done()) {
    if (ep.remaining() >= t_query) {
      const auto est = query_scores(ep, t_query, alpha, delta);
      ++queries;
      scores = est.clamped(floor);
      SetDescriptor next = with_menu_time_constraints(action, scores, k, p.mu_margin);
      if (has_nonempty_interior(next)) {
        action = std::move(next);
        if (opt) opt->contract_to(action);
      } else {
        ++skipped;
      }
      if (!opt) opt.emplace(action, opt_horizon, p.rcfkm);
    } else if (!opt) {
      while (!ep.done()) ep.play(random_menu(ep.algorithm_rng(), n, k));
      break;
    }
    const std::vector<double> vstar = ep.memory_vector();
    const std::size_t start = ep.rounds_played() + 1;
    double stage_reward = 0.0;
    std::size_t len = 0;
    while (!ep.done()) {
      const auto& x = opt->next(ep.algorithm_rng());
      const auto z = realizer.realize(x, scores);
      const auto out = ep.play(z.sample(ep.algorithm_rng().uniform()));
      opt->update(out.reward);
      stage_reward += out.reward;
      ++len;
      if (l2_distance(ep.memory_vector(), vstar) > p.rho && ep.remaining() >= t_query) break;
    }
    opt_rounds += len;
    if (len > 0)
      ep.annotate_stage({"optimize", start, len, opt->iterate(), stage_reward / static_cast<double>(len)});
  }
  if (opt) {
    diag["rcfkm_delta"] = opt->effective_delta();
    diag["rcfkm_xi"] = opt->xi();
  }
  diag["queries"] = static_cast<double>(queries);
  diag["skipped_estimates"] = static_cast<double>(skipped);
  diag["optimize_rounds"] = static_cast<double>(opt_rounds);
  diag["fallback_projections"] = static_cast<double>(realizer.fallbacks);
  diag["max_estimated_mu"] = realizer.max_mu;
  res.trace = ep.finish();
  return res;
}

RunResult run_alg2(Episode& ep, const Alg2Params& p) {
  const ClassMeta& meta = ep.declared_class();
  const std::size_t n = ep.n(), k = ep.k(), horizon = ep.horizon();
  RunResult res;
  auto& diag = res.diagnostics;
  const double sigma = meta.sigma.value_or(0.0);
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);

  if (p.checks.strict) {
    require(meta.sigma.has_value(), "Algorithm 2 needs a model declared pseudo-increasing");
    require(meta.lipschitz.has_value(), "Algorithm 2 needs a model declared smooth");
    require(k >= 2, "Algorithm 2 needs k >= 2 for the query routine");
    require_gamma_matches(ep, p.c, "Algorithm 2");
    require(sigma <= std::sqrt(4.0 * (nn - 1.0) / kk) + 1e-12,
            "Algorithm 2 needs sigma <= sqrt(4(n-1)/k)");
    require(p.phi >= 4.0 * kk * meta.lambda * sigma * sigma - 1e-12,
            "Algorithm 2 needs phi >= 4 k lambda sigma^2");
    require(p.t_step > 0 && p.clamp_radius >= 0.0, "Algorithm 2 needs t_step > 0");
  }
  require(p.phi > 0.0 && p.phi <= (nn - 1.0) / nn, "phi must lie in (0, (n-1)/n]");

  const double floor = score_floor_for(p.score_floor, meta);
  const std::size_t cells = make_query_plan(n, k).cells.size();
  const std::size_t t_query = std::max(p.t_query, cells);
  const double delta = p.delta > 0.0 ? p.delta : 1.0 / static_cast<double>(horizon);
  const double alpha = query_alpha(n, k, t_query, delta);
  diag["alpha"] = alpha;
  diag["phi"] = p.phi;
  diag["clamp_radius"] = p.clamp_radius;
  diag["t_query"] = static_cast<double>(t_query);
  diag["t_step"] = static_cast<double>(p.t_step);
  diag["t_burn"] = static_cast<double>(burn_in(ep, p.t_burn));

  const SetDescriptor delta_phi = SetDescriptor::smoothed_simplex(p.phi, n);
  const std::size_t stages_planned =
      std::max<std::size_t>(1, ep.remaining() / (t_query + p.t_step));
  Rcfkm opt(delta_phi, stages_planned, p.rcfkm);
  Realizer realizer{k, p.construction_eps, p.mu_margin};
  std::size_t stages = 0, enlarged = 0, early_exits = 0;
  double max_clamp_distance = 0.0;
  std::optional<MenuDistribution> last;

  while (!ep.done()) {
    if (ep.remaining() <= t_query) {
      while (!ep.done())
        ep.play(last ? last->sample(ep.algorithm_rng().uniform())
                     : random_menu(ep.algorithm_rng(), n, k));
      break;
    }
    const auto est = query_scores(ep, t_query, alpha, delta);
    const auto scores = est.clamped(floor);
    const std::vector<double> vstar = ep.memory_vector();
    const auto& x = opt.next(ep.algorithm_rng());

    const auto base = project_to_set(vstar, delta_phi);
    const double gap = l2_distance(base, vstar);
    double radius = p.clamp_radius;
    if (gap >= radius) {
      radius = gap * (1.0 + 1e-6) + 1e-12;
      ++enlarged;
    }
    SetDescriptor clamp = delta_phi;
    clamp.with_ball(vstar, radius);
    std::vector<double> target = project_to_set(x, clamp);
    max_clamp_distance = std::max(max_clamp_distance, l2_distance(target, vstar));

    std::vector<double> used;
    const auto z = realizer.realize(target, scores, &used);
    last = z;
    const std::size_t start = ep.rounds_played() + 1;
    const std::size_t hold = std::min(p.t_step, ep.remaining());
    double total = 0.0;
    std::size_t len = 0;
    while (len < hold) {
      total += ep.play(z.sample(ep.algorithm_rng().uniform())).reward;
      ++len;
      if (p.stop_on_exit && len < hold && l2_distance(ep.memory_vector(), vstar) > p.rho) {
        ++early_exits;
        break;
      }
    }
    const double avg = total / static_cast<double>(len);
    opt.update(avg);
    ep.annotate_stage({"step", start, len, used, avg});
    ++stages;
  }
  diag["stages"] = static_cast<double>(stages);
  diag["enlarged_clamps"] = static_cast<double>(enlarged);
  diag["early_exits"] = static_cast<double>(early_exits);
  diag["max_clamp_distance"] = max_clamp_distance;
  diag["fallback_projections"] = static_cast<double>(realizer.fallbacks);
  diag["max_estimated_mu"] = realizer.max_mu;
  res.trace = ep.finish();
  return res;
}

RunResult run_alg3(Episode& ep, const Alg3Params& p) {
  const ClassMeta& meta = ep.declared_class();
  const std::size_t n = ep.n(), k = ep.k(), horizon = ep.horizon();
  RunResult res;
  auto& diag = res.diagnostics;
  const double sigma = meta.sigma.value_or(1.0);
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);

  if (p.checks.strict) {
    require(meta.sigma.has_value(), "Algorithm 3 needs a model declared pseudo-increasing");
    require(ep.gamma() >= 0.0 && ep.gamma() < 1.0, "Algorithm 3 needs gamma in [0,1)");
    require(p.t_hold > 0, "Algorithm 3 needs t_hold > 0");
    const auto& regime = ep.rewards().regime();
    if (const auto* pw = std::get_if<PiecewiseStochastic>(&regime)) {
      require(pw->window >= p.t_hold, "Algorithm 3 needs reward windows of at least t_hold rounds");
    } else {
      require(!std::holds_alternative<AdversarialSequence>(regime),
              "Algorithm 3 needs piecewise-stationary rewards");
    }
  }
  const bool lambda_ok = meta.lambda >= sigma * sigma * kk / nn - 1e-12;
  const bool phi_ok = p.phi >= 2.0 * meta.lambda * kk * kk * kk * std::pow(sigma, 6.0) - 1e-12;
  diag["regime_lambda_ok"] = lambda_ok ? 1.0 : 0.0;
  diag["regime_phi_ok"] = phi_ok ? 1.0 : 0.0;
  require_regime(lambda_ok, p.checks, "Algorithm 3 assumes lambda >= sigma^2 k / n");
  require_regime(phi_ok, p.checks, "Algorithm 3 assumes phi >= 2 lambda k^3 sigma^6");

  const auto bounds = exp_phi_diagnostics(meta.lambda, sigma, k);
  diag["P1"] = bounds.p1;
  diag["P0"] = bounds.p0;
  diag["E_star"] = bounds.e_star;
  diag["alpha"] = p.alpha;
  diag["phi"] = p.phi;
  diag["t_hold"] = static_cast<double>(p.t_hold);

  const bool vertices = p.phi > 0.0 && p.phi < 1.0;
  const SmoothedSimplex ss{vertices ? p.phi : 0.5, n};
  const std::size_t pulls = (horizon + p.t_hold - 1) / p.t_hold;
  Exp3 bandit(n, pulls, p.exp3);
  std::vector<double> v(n);
  while (!ep.done()) {
    const std::size_t arm = bandit.next(ep.algorithm_rng());
    const std::size_t start = ep.rounds_played() + 1;
    const std::size_t len = std::min(p.t_hold, ep.remaining());
    double total = 0.0;
    for (std::size_t r = 0; r < len; ++r) {
      ep.memory().vector_into(v);
      total += ep.play(exp_phi_menu(arm, v, k)).reward;
    }
    const double avg = total / static_cast<double>(len);
    bandit.update(arm, avg);
    ep.memory().vector_into(v);
    res.pulls.push_back({arm, start, len, avg, v[arm]});
    ep.annotate_stage({"pull", start, len,
                       vertices ? ss.vertex(arm) : std::vector<double>{static_cast<double>(arm)}, avg});
  }
  diag["pulls"] = static_cast<double>(res.pulls.size());
  diag["clamped_rewards"] = static_cast<double>(bandit.clamped_rewards());
  res.trace = ep.finish();
  return res;
}

RunResult run_memoryless_exp3(Episode& ep, const MemorylessExp3Params& p) {
  if (p.checks.strict) require(ep.memoryless_model(), "memoryless EXP3 needs a constant model");
  const auto menus = all_menus(ep.n(), ep.k(), p.menu_cap);
  RunResult res;
  Exp3 bandit(menus.size(), ep.horizon(), p.exp3);
  while (!ep.done()) {
    const std::size_t arm = bandit.next(ep.algorithm_rng());
    bandit.update(arm, ep.play(menus[arm]).reward);
  }
  res.diagnostics["arms"] = static_cast<double>(menus.size());
  res.diagnostics["eta"] = bandit.eta();
  res.diagnostics["mix"] = bandit.mix();
  res.trace = ep.finish();
  return res;
}

RunResult run_memoryless_estimate(Episode& ep, const MemorylessEstimateParams& p) {
  const std::size_t n = ep.n(), k = ep.k(), horizon = ep.horizon();
  if (p.checks.strict) {
    require(ep.memoryless_model(), "memoryless estimation needs a constant model");
    require(k >= 2, "memoryless estimation needs k >= 2");
  }
  RunResult res;
  auto& diag = res.diagnostics;
  const std::size_t cells = make_query_plan(n, k).cells.size();
  std::size_t per_cell = p.rounds_per_cell ? p.rounds_per_cell : ceil_size(pow_t(horizon, 2.0 / 3.0));
  per_cell = std::max<std::size_t>(1, std::min(per_cell, (horizon - 1) / cells));
  const std::size_t t_query = per_cell * cells;
  if (t_query == 0 || t_query >= horizon)
    throw ConfigurationError("horizon too short for the estimation phase");
  const double delta = p.delta > 0.0 ? p.delta : 1.0 / static_cast<double>(horizon);
  const double alpha = query_alpha(n, k, t_query, delta);
  const auto est = query_scores(ep, t_query, alpha, delta);
  const auto scores = est.clamped(score_floor_for(p.score_floor, ep.declared_class()));
  diag["alpha"] = alpha;
  diag["t_query"] = static_cast<double>(t_query);
  for (std::size_t i = 0; i < n; ++i) diag["estimate_" + std::to_string(i)] = scores[i];

  const auto set = with_menu_time_constraints(SetDescriptor::simplex(n), scores, k, p.mu_margin);
  Rcfkm opt(set, ep.remaining(), p.rcfkm);
  Realizer realizer{k, p.construction_eps, p.mu_margin};
  const std::size_t start = ep.rounds_played() + 1;
  double total = 0.0;
  while (!ep.done()) {
    const auto& x = opt.next(ep.algorithm_rng());
    const auto z = realizer.realize(x, scores);
    const double r = ep.play(z.sample(ep.algorithm_rng().uniform())).reward;
    opt.update(r);
    total += r;
  }
  const std::size_t len = ep.rounds_played() + 1 - start;
  ep.annotate_stage({"optimize", start, len, opt.iterate(), total / static_cast<double>(len)});
  diag["fallback_projections"] = static_cast<double>(realizer.fallbacks);
  diag["max_estimated_mu"] = realizer.max_mu;
  diag["rcfkm_delta"] = opt.effective_delta();
  diag["rcfkm_xi"] = opt.xi();
  res.trace = ep.finish();
  return res;
}

}  // namespace menurec
