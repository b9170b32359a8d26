#include "menurec/bench.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <set>

#include <omp.h>

#include "menurec/error.hpp"
#include "menurec/lp.hpp"
#include "menurec/menus.hpp"

namespace menurec {

using nlohmann::json;

BenchmarkResult best_point_smoothed_simplex(std::span<const double> cumulative, double phi) {
  const std::size_t n = cumulative.size();
  if (n < 2) throw InvalidInput("smoothed simplex needs n >= 2");
  const double total = std::accumulate(cumulative.begin(), cumulative.end(), 0.0);
  const double share = phi / static_cast<double>(n - 1);
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = (1.0 - phi) * cumulative[i] + share * (total - cumulative[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  std::vector<double> point(n, share);
  point[best] = 1.0 - phi;
  return {best_value, std::move(point), std::nullopt};
}

BenchmarkResult best_point_eird(std::span<const double> cumulative, const PreferenceModel& model,
                                std::size_t k, std::span<const std::vector<double>> grid) {
  const std::size_t n = model.n();
  require_dimension(cumulative, n, "best_point_eird");
  if (grid.empty()) throw InvalidInput("EIRD benchmark needs a non-empty memory grid");
  LinearProgram lp;
  lp.num_vars = n;
  lp.objective.assign(cumulative.begin(), cumulative.end());
  lp.add(std::vector<double>(n, 1.0), Relation::equal, 1.0);
  std::vector<double> f(n);
  for (const auto& v : grid) {
    model.scores_into(v, f);
    for (auto& row : menu_time_normals(f, k)) lp.add(std::move(row), Relation::less_equal, 0.0);
  }
  const auto sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) throw InternalError("EIRD benchmark LP has no optimum");
  return {sol.objective, sol.x, std::nullopt};
}

std::vector<std::vector<double>> default_eird_grid(std::size_t n, double phi,
                                                   std::size_t random_points, std::uint64_t seed) {
  std::vector<std::vector<double>> grid;
  if (phi > 0.0 && phi < 1.0) {
    const SmoothedSimplex ss(phi, n);
    for (std::size_t i = 0; i < n; ++i) grid.push_back(ss.vertex(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> e(n, 0.0);
      e[i] = 1.0;
      grid.push_back(std::move(e));
    }
  }
  grid.emplace_back(n, 1.0 / static_cast<double>(n));
  Rng rng(seed);
  for (std::size_t p = 0; p < random_points; ++p) {
    std::vector<double> x(n);
    double s = 0.0;
    for (double& v : x) s += (v = rng.exponential());
    for (double& v : x) v /= s;
    grid.push_back(std::move(x));
  }
  return grid;
}

BenchmarkResult best_fixed_menu(const PreferenceModel& model, std::size_t k,
                                std::span<const double> cumulative, std::size_t cap) {
  if (!model.memoryless()) throw InvalidInput("fixed-menu benchmark needs a constant model");
  const std::size_t n = model.n();
  require_dimension(cumulative, n, "best_fixed_menu");
  const auto scores = model.scores(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  BenchmarkResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const Menu& m : all_menus(n, k, cap)) {
    double s = 0.0, v = 0.0;
    for (std::size_t i : m.items()) s += scores[i];
    for (std::size_t i : m.items()) v += scores[i] / s * cumulative[i];
    if (v > best.value) {
      best.value = v;
      best.menu = m;
    }
  }
  return best;
}

BenchmarkResult best_fixed_menu(const PreferenceModel& model, std::size_t k,
                                const RewardProcess& rewards, std::size_t horizon, std::size_t cap) {
  return best_fixed_menu(model, k, rewards.cumulative_expected(horizon), cap);
}

Benchmark Benchmark::smoothed_simplex(double phi) {
  if (!(phi >= 0.0 && phi < 1.0)) throw InvalidInput("smoothed simplex phi must lie in [0,1)");
  Benchmark b;
  b.kind_ = Kind::smoothed_simplex;
  b.phi_ = phi;
  return b;
}

Benchmark Benchmark::eird(const PreferenceModel& model, std::size_t k,
                          std::vector<std::vector<double>> grid) {
  Benchmark b;
  b.kind_ = Kind::eird;
  b.model_ = &model;
  b.k_ = k;
  if (model.memoryless()) grid = {std::vector<double>(model.n(), 1.0 / static_cast<double>(model.n()))};
  if (grid.empty()) throw InvalidInput("EIRD benchmark needs a non-empty memory grid");
  b.grid_ = std::move(grid);
  b.upper_bound_ = !model.memoryless();
  return b;
}

Benchmark Benchmark::fixed_menus(const PreferenceModel& model, std::size_t k, std::size_t cap) {
  if (!model.memoryless()) throw InvalidInput("fixed-menu benchmark needs a constant model");
  Benchmark b;
  b.kind_ = Kind::fixed_menus;
  b.model_ = &model;
  b.k_ = k;
  b.cap_ = cap;
  return b;
}

std::string Benchmark::name() const {
  switch (kind_) {
    case Kind::smoothed_simplex: return "smoothed_simplex(" + format_number(phi_) + ")";
    case Kind::eird: return "eird";
    case Kind::fixed_menus: return "fixed_menus";
  }
  return "unknown";
}

BenchmarkResult Benchmark::evaluate(std::span<const double> cumulative) const {
  switch (kind_) {
    case Kind::smoothed_simplex: return best_point_smoothed_simplex(cumulative, phi_);
    case Kind::eird: return best_point_eird(cumulative, *model_, k_, grid_);
    case Kind::fixed_menus: return best_fixed_menu(*model_, k_, cumulative, cap_);
  }
  throw InternalError("unknown benchmark kind");
}

RegretReport regret_curve(const RunTrace& trace, const Benchmark& benchmark,
                          const RewardProcess& rewards, std::span<const std::size_t> checkpoints,
                          std::uint64_t seed) {
  if (rewards.n() != trace.n) throw InvalidInput("reward process and trace disagree on n");
  std::vector<std::size_t> cps(checkpoints.begin(), checkpoints.end());
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (!cps.empty() && cps.back() > trace.rounds())
    throw InvalidInput("checkpoint beyond the end of the trace");
  RegretReport rep;
  rep.benchmark = benchmark.name();
  rep.upper_bound = benchmark.is_upper_bound();
  rep.seed = seed;
  double alg = 0.0;
  std::size_t done = 0;
  for (std::size_t t : cps) {
    for (; done < t; ++done) alg += trace.rewards[done];
    const auto bench = benchmark.evaluate(rewards.cumulative_expected(t));
    rep.curve.push_back({t, bench.value, alg, bench.value - alg});
    rep.final_benchmark = bench;
  }
  return rep;
}

std::vector<std::size_t> default_checkpoints(std::size_t horizon, std::size_t count) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= count; ++i) out.push_back(std::max<std::size_t>(1, horizon * i / count));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<AggregatePoint> aggregate(std::span<const RegretReport> reports) {
  std::map<std::size_t, std::vector<double>> by_t;
  for (const auto& r : reports)
    for (const auto& p : r.curve) by_t[p.t].push_back(p.regret);
  std::vector<AggregatePoint> out;
  for (const auto& [t, vals] : by_t) {
    AggregatePoint a;
    a.t = t;
    a.count = vals.size();
    a.mean_regret = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
    if (vals.size() > 1) {
      double ss = 0.0;
      for (double v : vals) ss += (v - a.mean_regret) * (v - a.mean_regret);
      a.se_regret = std::sqrt(ss / static_cast<double>(vals.size() - 1)) /
                    std::sqrt(static_cast<double>(vals.size()));
    }
    a.mean_regret_over_t = a.mean_regret / static_cast<double>(t);
    out.push_back(a);
  }
  return out;
}

double binomial_upper_tail(std::size_t m, std::size_t count) {
  double p = 0.0;
  for (std::size_t j = count; j <= m; ++j)
    p += std::exp(std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0) -
                  static_cast<double>(m) * std::log(2.0));
  return std::min(p, 1.0);
}

TrendTest sign_test_decreasing(const std::vector<std::vector<double>>& per_horizon, double alpha) {
  TrendTest t;
  for (const auto& row : per_horizon) {
    if (row.empty()) throw InvalidInput("trend test needs at least one seed per horizon");
    t.means.push_back(std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size()));
  }
  t.means_strictly_decreasing = true;
  bool all_significant = true;
  for (std::size_t h = 0; h + 1 < per_horizon.size(); ++h) {
    const auto& a = per_horizon[h];
    const auto& b = per_horizon[h + 1];
    if (a.size() != b.size()) throw InvalidInput("trend test needs paired seeds");
    std::size_t drops = 0;
    for (std::size_t s = 0; s < a.size(); ++s) drops += b[s] < a[s] ? 1 : 0;
    const double p = binomial_upper_tail(a.size(), drops);
    t.decreases.push_back(drops);
    t.p_values.push_back(p);
    if (!(t.means[h + 1] < t.means[h])) t.means_strictly_decreasing = false;
    if (!(p < alpha)) all_significant = false;
  }
  t.passed = t.means_strictly_decreasing && all_significant;
  return t;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigurationError(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigurationError("unknown key '" + key + "' in " + where);
}

Matrix matrix_from(const json& spec, std::size_t n, double default_mixing) {
  if (spec.contains("matrix")) {
    const auto rows = spec.at("matrix").get<std::vector<std::vector<double>>>();
    if (rows.size() != n) throw ConfigurationError("matrix must have n rows");
    Matrix m;
    m.n = n;
    for (const auto& r : rows) {
      if (r.size() != n) throw ConfigurationError("matrix must be n x n");
      m.data.insert(m.data.end(), r.begin(), r.end());
    }
    return m;
  }
  return Matrix::uniform_mixing(n, get_or(spec, "mixing", default_mixing));
}

RcfkmOptions rcfkm_from(const json& j, RcfkmOptions o) {
  reject_unknown(j, {"eta_scale", "delta_scale", "baseline", "max_xi"}, "rcfkm");
  o.max_xi = get_or(j, "max_xi", o.max_xi);
  o.eta_scale = get_or(j, "eta_scale", o.eta_scale);
  o.delta_scale = get_or(j, "delta_scale", o.delta_scale);
  o.baseline = get_or(j, "baseline", o.baseline);
  return o;
}

Exp3Options exp3_from(const json& j, Exp3Options o) {
  reject_unknown(j, {"eta", "mix"}, "exp3");
  o.eta = get_or(j, "eta", o.eta);
  o.mix = get_or(j, "mix", o.mix);
  return o;
}

Strictness strictness_from(const json& j) {
  Strictness s;
  s.strict = get_or(j, "strict", s.strict);
  s.enforce_regime = get_or(j, "enforce_regime", s.enforce_regime);
  return s;
}

std::size_t ceil_size(double x) { return static_cast<std::size_t>(std::max(0.0, std::ceil(x - 1e-9))); }

RunResult dispatch(const ExperimentConfig& cfg, Episode& ep, std::size_t horizon) {
  const json& j = cfg.algorithm_params;
  const std::string& name = cfg.algorithm;
  if (name == "alg1") {
    reject_unknown(j, {"rho", "beta", "delta", "t_burn", "t_query", "query_scale", "construction_eps",
                       "score_floor", "mu_margin", "rcfkm", "strict", "enforce_regime"},
                   "alg1 params");
    const double c = cfg.c_at(horizon);
    auto p = Alg1Params::defaults(horizon, c);
    if (j.contains("rho")) {
      p.rho = j.at("rho").get<double>();
      p.beta = p.rho * p.rho;
    }
    p.beta = get_or(j, "beta", p.beta);
    p.t_query = ceil_size(p.beta * std::pow(static_cast<double>(horizon), c) *
                          get_or(j, "query_scale", 1.0));
    p.t_query = get_or(j, "t_query", p.t_query);
    p.t_burn = get_or(j, "t_burn", p.t_burn);
    p.delta = get_or(j, "delta", p.delta);
    p.construction_eps = get_or(j, "construction_eps", p.construction_eps);
    p.score_floor = get_or(j, "score_floor", p.score_floor);
    p.mu_margin = get_or(j, "mu_margin", p.mu_margin);
    if (j.contains("rcfkm")) p.rcfkm = rcfkm_from(j.at("rcfkm"), p.rcfkm);
    p.checks = strictness_from(j);
    return run_alg1(ep, p);
  }
  if (name == "alg2") {
    reject_unknown(j, {"y", "z", "rho", "delta", "t_burn", "t_query", "t_step", "phi", "clamp_radius",
                       "clamp_scale", "construction_eps", "score_floor", "mu_margin", "stop_on_exit",
                       "rcfkm", "strict", "enforce_regime"},
                   "alg2 params");
    const double c = cfg.c_at(horizon);
    auto p = Alg2Params::defaults(horizon, c, ep.k(), ep.declared_class());
    p.y = get_or(j, "y", p.y);
    p.z = get_or(j, "z", p.z);
    const double T = static_cast<double>(horizon);
    p.rho = get_or(j, "rho", std::pow(T, -p.z));
    p.t_query = get_or(j, "t_query", ceil_size(std::pow(T, c - p.y)));
    p.t_step = get_or(j, "t_step", ceil_size(std::pow(T, c - p.z)));
    p.t_burn = get_or(j, "t_burn", p.t_burn);
    p.phi = get_or(j, "phi", p.phi);
    p.clamp_radius = get_or(j, "clamp_radius",
                            ep.declared_class().lambda * p.phi * get_or(j, "clamp_scale", 1.0));
    p.delta = get_or(j, "delta", p.delta);
    p.construction_eps = get_or(j, "construction_eps", p.construction_eps);
    p.score_floor = get_or(j, "score_floor", p.score_floor);
    p.mu_margin = get_or(j, "mu_margin", p.mu_margin);
    p.stop_on_exit = get_or(j, "stop_on_exit", p.stop_on_exit);
    if (j.contains("rcfkm")) p.rcfkm = rcfkm_from(j.at("rcfkm"), p.rcfkm);
    p.checks = strictness_from(j);
    return run_alg2(ep, p);
  }
  if (name == "alg3") {
    reject_unknown(j, {"alpha0", "alpha", "t_hold", "phi", "exp3", "strict", "enforce_regime"},
                   "alg3 params");
    auto p = Alg3Params::defaults(horizon, ep.gamma(), ep.k(), ep.declared_class(),
                                  get_or(j, "alpha0", 1.0));
    if (j.contains("alpha")) {
      p.alpha = j.at("alpha").get<double>();
      const double hold = std::ceil(4.0 / (std::pow(p.alpha, 4.0) * (1.0 - ep.gamma())) - 1e-9);
      p.t_hold = std::max<std::size_t>(
          1, std::min<std::size_t>(std::max<std::size_t>(1, horizon / 10), ceil_size(hold)));
    }
    p.t_hold = get_or(j, "t_hold", p.t_hold);
    p.phi = get_or(j, "phi", p.phi);
    if (j.contains("exp3")) p.exp3 = exp3_from(j.at("exp3"), p.exp3);
    p.checks = strictness_from(j);
    return run_alg3(ep, p);
  }
  if (name == "memoryless_exp3") {
    reject_unknown(j, {"exp3", "menu_cap", "strict", "enforce_regime"}, "memoryless_exp3 params");
    MemorylessExp3Params p;
    if (j.contains("exp3")) p.exp3 = exp3_from(j.at("exp3"), p.exp3);
    p.menu_cap = get_or(j, "menu_cap", p.menu_cap);
    p.checks = strictness_from(j);
    return run_memoryless_exp3(ep, p);
  }
  if (name == "memoryless_estimate") {
    reject_unknown(j, {"rounds_per_cell", "delta", "construction_eps", "score_floor", "mu_margin",
                       "rcfkm", "strict", "enforce_regime"},
                   "memoryless_estimate params");
    MemorylessEstimateParams p;
    p.rounds_per_cell = get_or(j, "rounds_per_cell", p.rounds_per_cell);
    p.delta = get_or(j, "delta", p.delta);
    p.construction_eps = get_or(j, "construction_eps", p.construction_eps);
    p.score_floor = get_or(j, "score_floor", p.score_floor);
    p.mu_margin = get_or(j, "mu_margin", p.mu_margin);
    if (j.contains("rcfkm")) p.rcfkm = rcfkm_from(j.at("rcfkm"), p.rcfkm);
    p.checks = strictness_from(j);
    return run_memoryless_estimate(ep, p);
  }
  throw ConfigurationError("unknown algorithm '" + name + "'");
}

}  // namespace

double ExperimentConfig::gamma_at(std::size_t h) const {
  if (gamma) return *gamma;
  if (c) return gamma_for(h, *c);
  throw ConfigurationError("config needs gamma or c");
}

double ExperimentConfig::c_at(std::size_t h) const {
  if (c) return *c;
  if (gamma) {
    if (!(*gamma < 1.0) || h < 2) throw ConfigurationError("cannot infer c from gamma = 1");
    return -std::log(1.0 - *gamma) / std::log(static_cast<double>(h));
  }
  throw ConfigurationError("config needs gamma or c");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  try {
    reject_unknown(j, {"model", "k", "horizon", "gamma", "c", "algorithm", "rewards", "benchmark",
                       "seeds", "horizons", "checkpoints", "initial_memory", "write_traces"},
                   "config");
    ExperimentConfig cfg;
    cfg.model = j.at("model");
    cfg.k = j.at("k").get<std::size_t>();
    cfg.horizon = j.at("horizon").get<std::size_t>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("c")) cfg.c = j.at("c").get<double>();
    if (cfg.gamma && cfg.c) throw ConfigurationError("give either gamma or c, not both");
    if (!cfg.gamma && !cfg.c) throw ConfigurationError("config needs gamma or c");
    const json& alg = j.at("algorithm");
    if (alg.is_string()) {
      cfg.algorithm = alg.get<std::string>();
    } else {
      reject_unknown(alg, {"name", "params"}, "algorithm");
      cfg.algorithm = alg.at("name").get<std::string>();
      if (alg.contains("params")) cfg.algorithm_params = alg.at("params");
    }
    cfg.rewards = j.at("rewards");
    cfg.benchmark = j.at("benchmark");
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) throw ConfigurationError("seeds must not be empty");
    if (j.contains("horizons")) cfg.horizons = j.at("horizons").get<std::vector<std::size_t>>();
    if (j.contains("checkpoints")) cfg.checkpoints = j.at("checkpoints").get<std::vector<std::size_t>>();
    if (j.contains("initial_memory"))
      cfg.initial_memory = j.at("initial_memory").get<std::vector<double>>();
    cfg.write_traces = get_or(j, "write_traces", true);
    if (cfg.horizon == 0) throw ConfigurationError("horizon must be positive");
    for (std::size_t h : cfg.horizons)
      if (h == 0) throw ConfigurationError("horizons must be positive");
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("malformed config: ") + e.what());
  }
}

json ExperimentConfig::to_json() const {
  json j;
  j["model"] = model;
  j["k"] = k;
  j["horizon"] = horizon;
  if (gamma) j["gamma"] = *gamma;
  if (c) j["c"] = *c;
  j["algorithm"] = {{"name", algorithm}, {"params", algorithm_params}};
  j["rewards"] = rewards;
  j["benchmark"] = benchmark;
  j["seeds"] = seeds;
  if (!horizons.empty()) j["horizons"] = horizons;
  if (!checkpoints.empty()) j["checkpoints"] = checkpoints;
  if (initial_memory) j["initial_memory"] = *initial_memory;
  j["write_traces"] = write_traces;
  return j;
}

PreferenceModel build_model(const json& spec) {
  try {
    const std::string family = spec.at("family").get<std::string>();
    if (family == "constant") {
      reject_unknown(spec, {"family", "scores"}, "model");
      return make_constant_model(spec.at("scores").get<std::vector<double>>());
    }
    if (family == "linear_mix") {
      reject_unknown(spec, {"family", "n", "lambda", "mixing", "matrix"}, "model");
      const auto n = spec.at("n").get<std::size_t>();
      return make_linear_mix_model(n, spec.at("lambda").get<double>(), matrix_from(spec, n, 1.0));
    }
    if (family == "pseudo_increasing") {
      reject_unknown(spec, {"family", "n", "lambda", "beta", "mixing", "matrix"}, "model");
      const auto n = spec.at("n").get<std::size_t>();
      return make_pseudo_increasing_model(n, spec.at("lambda").get<double>(),
                                          get_or(spec, "beta", 0.0), matrix_from(spec, n, 0.0));
    }
    if (family == "mis") {
      reject_unknown(spec, {"family", "graph", "lambda", "eps_interp"}, "model");
      const json& g = spec.at("graph");
      Graph graph(g.at("vertices").get<std::size_t>());
      for (const auto& e : get_or(g, "edges", std::vector<std::vector<std::size_t>>{})) {
        if (e.size() != 2) throw ConfigurationError("graph edges are pairs");
        graph.add_edge(e[0], e[1]);
      }
      return make_mis_model(graph, spec.at("lambda").get<double>(), get_or(spec, "eps_interp", 0.01));
    }
    if (family == "lottery") {
      reject_unknown(spec, {"family", "n", "gamma", "seed"}, "model");
      return make_lottery_model(spec.at("n").get<std::size_t>(), spec.at("gamma").get<double>(),
                                get_or<std::uint64_t>(spec, "seed", 0));
    }
    throw ConfigurationError("unknown model family '" + family + "'");
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("malformed model spec: ") + e.what());
  }
}

RewardProcess build_rewards(const json& spec, std::size_t n, std::uint64_t seed, std::size_t horizon) {
  try {
    const std::string regime = spec.at("regime").get<std::string>();
    if (regime == "fixed") {
      reject_unknown(spec, {"regime", "values"}, "rewards");
      return RewardProcess(FixedRewards{spec.at("values").get<std::vector<double>>()}, n, seed);
    }
    if (regime == "piecewise") {
      reject_unknown(spec, {"regime", "window", "window_fraction", "means"}, "rewards");
      std::size_t window = 0;
      if (spec.contains("window_fraction")) {
        const double f = spec.at("window_fraction").get<double>();
        if (!(f > 0.0 && f <= 1.0)) throw ConfigurationError("window_fraction must lie in (0,1]");
        window = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(f * static_cast<double>(horizon))));
      } else {
        window = spec.at("window").get<std::size_t>();
      }
      return RewardProcess(PiecewiseStochastic{window,
                                               spec.at("means").get<std::vector<std::vector<double>>>()},
                           n, seed);
    }
    if (regime == "indicator") {
      reject_unknown(spec, {"regime", "item"}, "rewards");
      return RewardProcess(ItemIndicator{spec.at("item").get<std::size_t>()}, n, seed);
    }
    if (regime == "adversarial") {
      reject_unknown(spec, {"regime", "rounds"}, "rewards");
      return RewardProcess(
          AdversarialSequence{spec.at("rounds").get<std::vector<std::vector<double>>>()}, n, seed);
    }
    throw ConfigurationError("unknown reward regime '" + regime + "'");
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("malformed reward spec: ") + e.what());
  }
}

namespace {

Benchmark build_benchmark_with(const json& spec, const PreferenceModel& model, std::size_t k,
                               const std::map<std::string, double>& diagnostics) {
  try {
    const std::string name = spec.at("name").get<std::string>();
    if (name == "smoothed_simplex") {
      reject_unknown(spec, {"name", "phi"}, "benchmark");
      if (spec.contains("phi")) return Benchmark::smoothed_simplex(spec.at("phi").get<double>());
      const auto it = diagnostics.find("phi");
      if (it == diagnostics.end()) throw ConfigurationError("smoothed_simplex benchmark needs phi");
      return Benchmark::smoothed_simplex(it->second);
    }
    if (name == "eird") {
      reject_unknown(spec, {"name", "phi", "random_points", "grid_seed"}, "benchmark");
      return Benchmark::eird(model, k,
                             default_eird_grid(model.n(), get_or(spec, "phi", 0.1),
                                               get_or<std::size_t>(spec, "random_points", 50),
                                               get_or<std::uint64_t>(spec, "grid_seed", 7)));
    }
    if (name == "fixed_menus") {
      reject_unknown(spec, {"name", "menu_cap"}, "benchmark");
      return Benchmark::fixed_menus(model, k, get_or<std::size_t>(spec, "menu_cap", 100000));
    }
    throw ConfigurationError("unknown benchmark '" + name + "'");
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("malformed benchmark spec: ") + e.what());
  }
}

}  // namespace

Benchmark build_benchmark(const json& spec, const PreferenceModel& model, std::size_t k) {
  return build_benchmark_with(spec, model, k, {});
}

CellResult run_cell(const ExperimentConfig& cfg, const PreferenceModel& model, std::size_t horizon,
                    std::uint64_t seed) {
  const Seeds seeds = Seeds::from_master(seed);
  EpisodeOptions opts;
  opts.initial_memory = cfg.initial_memory;
  Episode ep(model, cfg.k, cfg.gamma_at(horizon), build_rewards(cfg.rewards, model.n(), seeds.rewards, horizon),
             horizon, seeds, opts);
  CellResult cell;
  cell.horizon = horizon;
  cell.seed = seed;
  cell.run = dispatch(cfg, ep, horizon);
  const Benchmark bench = build_benchmark_with(cfg.benchmark, model, cfg.k, cell.run.diagnostics);
  std::vector<std::size_t> cps;
  for (std::size_t t : cfg.checkpoints)
    if (t <= horizon) cps.push_back(t);
  if (cps.empty()) cps = default_checkpoints(horizon);
  if (cps.back() != horizon && std::find(cps.begin(), cps.end(), horizon) == cps.end())
    cps.push_back(horizon);
  const RewardProcess rewards = build_rewards(cfg.rewards, model.n(), seeds.rewards, horizon);
  cell.report = regret_curve(cell.run.trace, bench, rewards, cps, seed);
  return cell;
}

namespace {

std::vector<std::pair<std::size_t, std::uint64_t>> sweep_cells(const ExperimentConfig& cfg) {
  std::vector<std::size_t> hs = cfg.horizons.empty() ? std::vector<std::size_t>{cfg.horizon} : cfg.horizons;
  std::vector<std::pair<std::size_t, std::uint64_t>> cells;
  for (std::size_t h : hs)
    for (std::uint64_t s : cfg.seeds) cells.emplace_back(h, s);
  return cells;
}

}  // namespace

std::vector<CellResult> run_sweep(const ExperimentConfig& cfg, int threads) {
  const PreferenceModel model = build_model(cfg.model);
  const auto cells = sweep_cells(cfg);
  std::vector<CellResult> out(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  const int nt = threads > 0 ? threads : omp_get_max_threads();
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[i] = run_cell(cfg, model, cells[i].first, cells[i].second);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<CellResult> run_sweep_serial(const ExperimentConfig& cfg) {
  const PreferenceModel model = build_model(cfg.model);
  std::vector<CellResult> out;
  for (const auto& [h, s] : sweep_cells(cfg)) out.push_back(run_cell(cfg, model, h, s));
  return out;
}

void write_report_rows(std::ostream& out, const RegretReport& report) {
  for (const auto& p : report.curve)
    out << p.t << ',' << report.seed << ',' << format_number(p.regret) << ','
        << format_number(p.benchmark_value) << ',' << format_number(p.alg_reward) << '\n';
}

void write_report_csv(std::ostream& out, std::span<const RegretReport> reports) {
  out << "T_checkpoint,seed,regret,benchmark_value,alg_reward\n";
  for (const auto& r : reports) write_report_rows(out, r);
}

void write_summary(std::ostream& out, const std::map<std::string, std::string>& entries) {
  for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
}

std::map<std::string, std::string> summarize(const ExperimentConfig& cfg,
                                             std::span<const CellResult> cells) {
  std::map<std::string, std::string> s;
  s["algorithm"] = cfg.algorithm;
  s["k"] = std::to_string(cfg.k);
  s["model_family"] = cfg.model.value("family", "");
  s["seeds"] = std::to_string(cfg.seeds.size());
  if (cfg.gamma) s["gamma"] = format_number(*cfg.gamma);
  if (cfg.c) s["c"] = format_number(*cfg.c);
  if (cells.empty()) return s;
  s["benchmark"] = cells.front().report.benchmark;
  s["benchmark_is_upper_bound"] = cells.front().report.upper_bound ? "true" : "false";

  std::map<std::size_t, std::vector<const CellResult*>> by_h;
  for (const auto& c : cells) by_h[c.horizon].push_back(&c);
  std::vector<std::vector<double>> trend;
  std::string hlist;
  for (const auto& [h, group] : by_h) {
    hlist += (hlist.empty() ? "" : ",") + std::to_string(h);
    const std::string tag = "_T" + std::to_string(h);
    std::vector<RegretReport> reps;
    std::vector<double> per_seed;
    std::map<std::string, double> diag_sum;
    for (const auto* c : group) {
      reps.push_back(c->report);
      per_seed.push_back(c->report.curve.back().regret / static_cast<double>(h));
      for (const auto& [k, v] : c->run.diagnostics) diag_sum[k] += v;
    }
    const auto agg = aggregate(reps);
    const auto& last = agg.back();
    s["mean_regret" + tag] = format_number(last.mean_regret);
    s["se_regret" + tag] = format_number(last.se_regret);
    s["mean_regret_over_T" + tag] = format_number(last.mean_regret_over_t);
    double bench = 0.0, alg = 0.0;
    for (const auto& r : reps) {
      bench += r.curve.back().benchmark_value / static_cast<double>(reps.size());
      alg += r.curve.back().alg_reward / static_cast<double>(reps.size());
    }
    s["mean_benchmark_value" + tag] = format_number(bench);
    s["mean_alg_reward" + tag] = format_number(alg);
    for (const auto& [k, v] : diag_sum)
      s["diag_" + k + tag] = format_number(v / static_cast<double>(group.size()));
    trend.push_back(per_seed);
  }
  s["horizons"] = hlist;
  if (trend.size() >= 2) {
    const auto t = sign_test_decreasing(trend);
    std::string ps;
    for (double p : t.p_values) ps += (ps.empty() ? "" : ",") + format_number(p);
    s["trend_p_values"] = ps;
    s["trend_means_strictly_decreasing"] = t.means_strictly_decreasing ? "true" : "false";
    s["trend_passed"] = t.passed ? "true" : "false";
  }
  return s;
}

}  // namespace menurec
