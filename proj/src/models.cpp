#include "menurec/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "menurec/core.hpp"
#include "menurec/error.hpp"
#include "menurec/rng.hpp"

namespace menurec {

PreferenceModel::PreferenceModel(std::string family, std::size_t n, ClassMeta meta, ScoreFn fn,
                                 bool memoryless)
    : family_(std::move(family)), n_(n), meta_(meta), fn_(std::move(fn)), memoryless_(memoryless) {
  if (n_ < 2) throw InvalidInput("a preference model needs at least two items");
  if (!(meta_.lambda > 0.0 && meta_.lambda <= 1.0)) throw InvalidModel("score floor must lie in (0,1]");
}

ScoreVector PreferenceModel::scores(std::span<const double> v) const {
  ScoreVector out(n_);
  scores_into(v, out);
  return out;
}

void PreferenceModel::scores_into(std::span<const double> v, std::span<double> out) const {
  require_dimension(v, n_, "model scores");
  if (out.size() != n_) throw InvalidInput("score output has wrong dimension");
  fn_(v, out);
}

Matrix Matrix::identity(std::size_t n) { return uniform_mixing(n, 0.0); }

Matrix Matrix::uniform_mixing(std::size_t n, double w) {
  Matrix m{n, std::vector<double>(n * n, w / static_cast<double>(n))};
  for (std::size_t i = 0; i < n; ++i) m.data[i * n + i] += 1.0 - w;
  return m;
}

namespace {

void check_stochastic(std::size_t n, const Matrix& a) {
  if (a.n != n || a.data.size() != n * n) throw InvalidInput("matrix dimension does not match n");
  for (std::size_t c = 0; c < n; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (!(a(r, c) >= 0.0)) throw InvalidInput("matrix entries must be non-negative");
      sum += a(r, c);
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("matrix is not column-stochastic");
  }
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("lambda must lie in (0,1)");
}

double max_row_norm(const Matrix& a, double diag_weight, double row_weight) {
  double best = 0.0;
  for (std::size_t r = 0; r < a.n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.n; ++c) {
      const double v = row_weight * a(r, c) + (r == c ? diag_weight : 0.0);
      s += v * v;
    }
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

}  // namespace

PreferenceModel make_linear_mix_model(std::size_t n, double lambda, const Matrix& a) {
  check_lambda(lambda);
  check_stochastic(n, a);
  ClassMeta meta;
  meta.lambda = lambda;
  meta.constant_sum = (1.0 - lambda) + static_cast<double>(n) * lambda;
  meta.lipschitz = (1.0 - lambda) * max_row_norm(a, 0.0, 1.0);
  auto fn = [a, lambda](std::span<const double> v, std::span<double> out) {
    const std::size_t n = a.n;
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c) s += a(r, c) * v[c];
      out[r] = (1.0 - lambda) * s + lambda;
    }
  };
  return PreferenceModel("linear-mix", n, meta, fn);
}

PreferenceModel make_pseudo_increasing_model(std::size_t n, double lambda, double beta,
                                             const Matrix& a) {
  check_lambda(lambda);
  check_stochastic(n, a);
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidInput("beta must lie in [0,1)");
  ClassMeta meta;
  meta.lambda = lambda;
  meta.constant_sum = (1.0 - lambda) + static_cast<double>(n) * lambda;
  meta.sigma = std::max(1.0 / (1.0 - beta), 1.0 + beta * (1.0 - lambda) / lambda);
  meta.lipschitz = (1.0 - lambda) * max_row_norm(a, 1.0 - beta, beta);
  auto fn = [a, lambda, beta](std::span<const double> v, std::span<double> out) {
    const std::size_t n = a.n;
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      if (beta != 0.0)
        for (std::size_t c = 0; c < n; ++c) s += a(r, c) * v[c];
      out[r] = (1.0 - lambda) * ((1.0 - beta) * v[r] + beta * s) + lambda;
    }
  };
  return PreferenceModel("pseudo-increasing", n, meta, fn);
}

PreferenceModel make_constant_model(ScoreVector scores) {
  if (scores.size() < 2) throw InvalidInput("constant model needs at least two items");
  for (double s : scores)
    if (!(s > 0.0 && s <= 1.0)) throw InvalidInput("constant scores must lie in (0,1]");
  ClassMeta meta;
  meta.lambda = *std::min_element(scores.begin(), scores.end());
  meta.constant_sum = std::accumulate(scores.begin(), scores.end(), 0.0);
  meta.lipschitz = 0.0;
  const std::size_t n = scores.size();
  auto fn = [scores = std::move(scores)](std::span<const double>, std::span<double> out) {
    std::copy(scores.begin(), scores.end(), out.begin());
  };
  return PreferenceModel("constant", n, meta, fn, true);
}

void Graph::add_edge(std::size_t a, std::size_t b) {
  if (a >= vertices || b >= vertices) throw InvalidInput("edge endpoint out of range");
  if (a == b) throw InvalidInput("self-loops are not allowed");
  adjacency[a * vertices + b] = adjacency[b * vertices + a] = 1;
}

PreferenceModel make_mis_model(const Graph& g, double lambda, double eps) {
  check_lambda(lambda);
  if (!(eps > 0.0)) throw InvalidInput("eps_interp must be positive");
  if (g.vertices < 1) throw InvalidInput("graph must have at least one vertex");
  const std::size_t n = g.vertices + 1;
  ClassMeta meta;
  meta.lambda = lambda;
  auto fn = [g, lambda, eps](std::span<const double> v, std::span<double> out) {
    const std::size_t m = g.vertices;
    std::fill(out.begin(), out.end(), lambda);
    // S: vertices carrying at least eps memory weight.
    std::vector<std::size_t> s;
    double mass_all = 0.0, mass_s = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t j = 0; j < m; ++j) {
      const double w = v[j + 1];
      mass_all += w;
      if (w >= eps) {
        s.push_back(j);
        mass_s += w;
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
    }
    if (s.empty()) return;
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b)
        if (g.adjacent(s[a], s[b])) return;
    const double slack_mass = mass_s - (mass_all - eps);
    const double slack_spread = eps - (hi - lo);
    const double theta = std::clamp(1.0 + std::min(slack_mass, slack_spread) / eps, 0.0, 1.0);
    out[0] = lambda + theta * static_cast<double>(s.size()) * (1.0 - lambda) / static_cast<double>(m);
  };
  return PreferenceModel("mis", n, meta, fn);
}

LotteryModelInfo::LotteryModelInfo(std::size_t n, double gamma, std::uint64_t seed)
    : n_(n), gamma_(gamma), seed_(seed), h_(0) {
  if (n < 4 || n % 2 != 0) throw InvalidInput("lottery model needs an even n >= 4");
  if (!(gamma > 0.0 && gamma < 0.5)) throw InvalidInput("lottery model needs gamma in (0, 1/2)");
  h_ = static_cast<std::size_t>(
      std::ceil(std::log(static_cast<double>(n)) / std::log(1.0 / gamma) - 1e-12));
  h_ = std::max<std::size_t>(h_, 1);
  const double states = std::pow(static_cast<double>(n), static_cast<double>(h_));
  if (states > static_cast<double>(kLotteryStateCap))
    throw ResourceLimit("lottery state space n^h exceeds the enumeration cap");
}

std::vector<double> LotteryModelInfo::footprint(std::span<const std::size_t> state) const {
  std::vector<double> fp(n_, 0.0);
  double w = 1.0, total = 0.0;
  for (std::size_t s = 0; s < state.size(); ++s) {
    fp[state[s]] += w;
    total += w;
    w *= gamma_;
  }
  for (double& x : fp) x /= total;
  return fp;
}

std::vector<std::size_t> LotteryModelInfo::state_of(std::span<const double> v) const {
  require_dimension(v, n_, "lottery state_of");
  std::vector<double> weights(h_);
  double w = 1.0, total = 0.0;
  for (std::size_t s = 0; s < h_; ++s) {
    weights[s] = w;
    total += w;
    w *= gamma_;
  }
  for (double& x : weights) x /= total;
  const double base = std::accumulate(v.begin(), v.end(), 0.0, [](double a, double b) {
    return a + std::abs(b);
  });

  // Enumerate [n]^h in lexicographic order; ties keep the first found.
  std::vector<std::size_t> cur(h_, 0), best(h_, 0);
  std::vector<double> fp(n_, 0.0);
  double best_d = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> touched;
  touched.reserve(h_);
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == h_) {
      double d = base;
      touched.clear();
      for (std::size_t s = 0; s < h_; ++s) {
        const std::size_t j = cur[s];
        if (std::find(touched.begin(), touched.end(), j) != touched.end()) continue;
        touched.push_back(j);
        d += std::abs(v[j] - fp[j]) - std::abs(v[j]);
      }
      if (d < best_d - 1e-15) {
        best_d = d;
        best = cur;
      }
      return;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      cur[pos] = j;
      fp[j] += weights[pos];
      self(self, pos + 1);
      fp[j] -= weights[pos];
    }
  };
  rec(rec, 0);
  return best;
}

std::vector<std::size_t> LotteryModelInfo::group(std::span<const std::size_t> state) const {
  if (state.size() != h_) throw InvalidInput("lottery state has wrong length");
  std::uint64_t key = splitmix64(seed_ ^ 0x6c6f7474657279ULL);
  for (std::size_t s : state) key = splitmix64(key ^ static_cast<std::uint64_t>(s));
  Rng rng(key);
  std::vector<std::size_t> pool(n_ - 1);
  std::iota(pool.begin(), pool.end(), std::size_t{1});
  const std::size_t take = k() - 2;
  for (std::size_t i = 0; i < take; ++i) std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
  std::vector<std::size_t> out(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
  std::sort(out.begin(), out.end());
  return out;
}

ScoreVector LotteryModelInfo::scores_at_state(std::span<const std::size_t> state) const {
  ScoreVector out(n_, 1.0);
  out[0] = lambda();
  for (std::size_t i : group(state)) out[i] = lambda();
  return out;
}

PreferenceModel make_lottery_model(std::size_t n, double gamma, std::uint64_t seed) {
  auto info = std::make_shared<const LotteryModelInfo>(n, gamma, seed);
  ClassMeta meta;
  meta.lambda = info->lambda();
  meta.constant_sum = static_cast<double>(info->k() - 1) * info->lambda() +
                      static_cast<double>(n - info->k() + 1);
  auto fn = [info](std::span<const double> v, std::span<double> out) {
    const auto s = info->scores_at_state(info->state_of(v));
    std::copy(s.begin(), s.end(), out.begin());
  };
  return PreferenceModel("lottery", n, meta, fn);
}

ClassSpec ClassSpec::declared(const PreferenceModel& model) {
  ClassSpec spec;
  const auto& m = model.meta();
  spec.lambda = m.lambda;
  spec.constant_sum = m.constant_sum;
  spec.sigma = m.sigma;
  spec.lipschitz = m.lipschitz;
  if (model.memoryless()) spec.name = "constant";
  else if (m.sigma) spec.name = "pseudo-increasing";
  else if (m.constant_sum && m.lipschitz) spec.name = "smooth";
  else spec.name = "any";
  return spec;
}

std::size_t simplex_grid_size(std::size_t n, std::size_t m) {
  // C(m + n - 1, n - 1)
  double c = 1.0;
  for (std::size_t i = 1; i < n; ++i)
    c = c * static_cast<double>(m + i) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(c));
}

namespace {

std::vector<std::vector<std::uint32_t>> grid_compositions(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(simplex_grid_size(n, m));
  std::vector<std::uint32_t> c(n, 0);
  auto rec = [&](auto&& self, std::size_t i, std::uint32_t left) -> void {
    if (i + 1 == n) {
      c[i] = left;
      out.push_back(c);
      return;
    }
    for (std::uint32_t a = 0; a <= left; ++a) {
      c[i] = a;
      self(self, i + 1, left - a);
    }
  };
  rec(rec, 0, static_cast<std::uint32_t>(m));
  return out;
}

struct PointResult {
  double range = 0.0, sum = 0.0, sigma = 0.0, lipschitz_ratio = 0.0;
};

PointResult evaluate_point(const PreferenceModel& model, const ClassSpec& spec,
                           const std::vector<std::uint32_t>& comp, std::size_t m,
                           std::vector<double>& v, std::vector<double>& f,
                           std::vector<double>& g) {
  const std::size_t n = model.n();
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i) v[i] = comp[i] * inv;
  model.scores_into(v, f);
  PointResult r;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.range = std::max({r.range, spec.lambda - f[i], f[i] - 1.0});
    total += f[i];
    if (spec.sigma) {
      const double env = (1.0 - spec.lambda) * v[i] + spec.lambda;
      r.sigma = std::max({r.sigma, env / *spec.sigma - f[i], f[i] - *spec.sigma * env});
    }
  }
  if (spec.constant_sum) r.sum = std::abs(total - *spec.constant_sum);
  if (spec.lipschitz) {
    // Neighbours that move one grid unit from coordinate a to b.
    const double step = std::sqrt(2.0) * inv;
    for (std::size_t a = 0; a < n; ++a) {
      if (comp[a] == 0) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (b == a) continue;
        v[a] -= inv;
        v[b] += inv;
        model.scores_into(v, g);
        v[a] = comp[a] * inv;
        v[b] = comp[b] * inv;
        for (std::size_t i = 0; i < n; ++i)
          r.lipschitz_ratio = std::max(r.lipschitz_ratio, std::abs(g[i] - f[i]) / step);
      }
    }
  }
  return r;
}

double point_violation(const PointResult& r, const ClassSpec& spec) {
  double v = std::max({r.range, r.sum, r.sigma, 0.0});
  if (spec.lipschitz) v = std::max(v, r.lipschitz_ratio - *spec.lipschitz);
  return v;
}

struct Accumulator {
  double max_violation = -1.0;
  std::size_t witness = 0;
  PointResult worst;  // componentwise maxima

  void add(const PointResult& r, double violation, std::size_t index) {
    worst.range = std::max(worst.range, r.range);
    worst.sum = std::max(worst.sum, r.sum);
    worst.sigma = std::max(worst.sigma, r.sigma);
    worst.lipschitz_ratio = std::max(worst.lipschitz_ratio, r.lipschitz_ratio);
    if (violation > max_violation || (violation == max_violation && index < witness)) {
      max_violation = violation;
      witness = index;
    }
  }
  void merge(const Accumulator& o) {
    worst.range = std::max(worst.range, o.worst.range);
    worst.sum = std::max(worst.sum, o.worst.sum);
    worst.sigma = std::max(worst.sigma, o.worst.sigma);
    worst.lipschitz_ratio = std::max(worst.lipschitz_ratio, o.worst.lipschitz_ratio);
    if (o.max_violation > max_violation ||
        (o.max_violation == max_violation && o.witness < witness)) {
      max_violation = o.max_violation;
      witness = o.witness;
    }
  }
};

double clip(double v) { return v <= kClassTolerance ? 0.0 : v; }

ClassReport finish_report(const PreferenceModel& model, const ClassSpec& spec,
                          const std::vector<std::vector<std::uint32_t>>& grid, std::size_t m,
                          const Accumulator& acc) {
  ClassReport rep;
  rep.class_name = spec.name;
  rep.grid_size = grid.size();
  rep.range_violation = clip(acc.worst.range);
  rep.sum_violation = clip(acc.worst.sum);
  rep.sigma_violation = clip(acc.worst.sigma);
  rep.empirical_lipschitz = acc.worst.lipschitz_ratio;
  rep.lipschitz_violation =
      spec.lipschitz ? clip(acc.worst.lipschitz_ratio - *spec.lipschitz) : 0.0;
  rep.max_violation = clip(acc.max_violation);
  rep.witness_vector.resize(model.n());
  for (std::size_t i = 0; i < model.n(); ++i)
    rep.witness_vector[i] = grid[acc.witness][i] / static_cast<double>(m);
  return rep;
}

std::size_t grid_divisions(double resolution) {
  if (!(resolution > 0.0 && resolution <= 1.0)) throw InvalidInput("grid resolution must lie in (0,1]");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / resolution)));
}

}  // namespace

ClassReport verify_class_serial(const PreferenceModel& model, const ClassSpec& spec,
                                double grid_resolution) {
  const std::size_t m = grid_divisions(grid_resolution);
  const auto grid = grid_compositions(model.n(), m);
  std::vector<double> v(model.n()), f(model.n()), g(model.n());
  Accumulator acc;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const auto r = evaluate_point(model, spec, grid[idx], m, v, f, g);
    acc.add(r, point_violation(r, spec), idx);
  }
  return finish_report(model, spec, grid, m, acc);
}

ClassReport verify_class(const PreferenceModel& model, const ClassSpec& spec,
                         double grid_resolution) {
  const std::size_t m = grid_divisions(grid_resolution);
  const auto grid = grid_compositions(model.n(), m);
  const auto count = static_cast<std::ptrdiff_t>(grid.size());
  Accumulator total;
#pragma omp parallel
  {
    std::vector<double> v(model.n()), f(model.n()), g(model.n());
    Accumulator local;
#pragma omp for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
      const auto i = static_cast<std::size_t>(idx);
      const auto r = evaluate_point(model, spec, grid[i], m, v, f, g);
      local.add(r, point_violation(r, spec), i);
    }
#pragma omp critical
    total.merge(local);
  }
  return finish_report(model, spec, grid, m, total);
}

}  // namespace menurec
