#include "menurec/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "menurec/error.hpp"

namespace menurec {

MemoryState MemoryState::empty(std::size_t n, double gamma) {
  if (n == 0) throw InvalidInput("memory needs at least one item");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidInput("gamma must lie in [0,1]");
  MemoryState s;
  s.weighted_sum_.assign(n, 0.0);
  s.gamma_ = gamma;
  return s;
}

MemoryState MemoryState::primed(std::size_t n, double gamma,
                                std::optional<std::vector<double>> initial, double prime_weight) {
  MemoryState s = empty(n, gamma);
  if (!(prime_weight > 0.0)) throw InvalidInput("prime weight must be positive");
  const ItemDistribution v0 = initial ? ItemDistribution(*initial) : ItemDistribution::uniform(n);
  require_dimension(v0.probs(), n, "initial memory");
  for (std::size_t i = 0; i < n; ++i) s.weighted_sum_[i] = prime_weight * v0[i];
  s.normalizer_ = prime_weight;
  return s;
}

void MemoryState::update(std::size_t chosen) {
  if (chosen >= weighted_sum_.size()) throw InvalidInput("chosen item out of range");
  if (gamma_ != 1.0)
    for (double& w : weighted_sum_) w *= gamma_;
  weighted_sum_[chosen] += 1.0;
  normalizer_ = gamma_ * normalizer_ + 1.0;
  ++t_;
}

std::vector<double> MemoryState::vector() const {
  std::vector<double> v(weighted_sum_.size());
  vector_into(v);
  return v;
}

void MemoryState::vector_into(std::span<double> out) const {
  if (!(normalizer_ > 0.0)) throw InvalidInput("memory vector is undefined before any selection");
  const double inv = 1.0 / normalizer_;
  for (std::size_t i = 0; i < weighted_sum_.size(); ++i) out[i] = weighted_sum_[i] * inv;
}

MemoryState update_memory(MemoryState state, std::size_t chosen) {
  state.update(chosen);
  return state;
}

std::size_t agent_choose_with_scores(std::span<const double> scores, const Menu& menu, Rng& rng) {
  double total = 0.0;
  for (std::size_t i : menu.items()) total += scores[i];
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i : menu.items()) {
    acc += scores[i];
    if (u < acc) return i;
  }
  return menu.items().back();
}

std::size_t agent_choose(const PreferenceModel& model, const MemoryState& state, const Menu& menu,
                         Rng& rng) {
  return agent_choose_with_scores(model.scores(state.vector()), menu, rng);
}

namespace {

void check_reward_vector(const std::vector<double>& r, std::size_t n, const char* what) {
  if (r.size() != n) throw InvalidInput(std::string(what) + ": reward vector has wrong dimension");
  for (double x : r)
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput(std::string(what) + ": rewards must lie in [0,1]");
}

}  // namespace

RewardProcess::RewardProcess(RewardRegime regime, std::size_t n, std::uint64_t seed)
    : regime_(std::move(regime)), n_(n), rng_(seed) {
  std::visit(
      [n](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, FixedRewards>) {
          check_reward_vector(r.values, n, "fixed rewards");
        } else if constexpr (std::is_same_v<T, PiecewiseStochastic>) {
          if (r.window == 0 || r.means.empty()) throw InvalidInput("piecewise rewards need windows");
          for (const auto& m : r.means) check_reward_vector(m, n, "piecewise rewards");
        } else if constexpr (std::is_same_v<T, AdversarialSequence>) {
          for (const auto& m : r.rounds) check_reward_vector(m, n, "reward sequence");
        } else {
          if (r.item >= n) throw InvalidInput("indicator item out of range");
        }
      },
      regime_);
}

std::vector<double> RewardProcess::expected(std::size_t t) const {
  if (t == 0) throw InvalidInput("rounds are 1-based");
  return std::visit(
      [&](const auto& r) -> std::vector<double> {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, FixedRewards>) {
          return r.values;
        } else if constexpr (std::is_same_v<T, PiecewiseStochastic>) {
          return r.means[((t - 1) / r.window) % r.means.size()];
        } else if constexpr (std::is_same_v<T, AdversarialSequence>) {
          if (t > r.rounds.size()) throw InvalidInput("reward sequence exhausted");
          return r.rounds[t - 1];
        } else {
          std::vector<double> v(n_, 0.0);
          v[r.item] = 1.0;
          return v;
        }
      },
      regime_);
}

void RewardProcess::draw(std::size_t t, std::span<double> out) {
  if (out.size() != n_) throw InvalidInput("reward output has wrong dimension");
  if (const auto* p = std::get_if<PiecewiseStochastic>(&regime_)) {
    const auto& m = p->means[((t - 1) / p->window) % p->means.size()];
    for (std::size_t i = 0; i < n_; ++i) out[i] = rng_.bernoulli(m[i]) ? 1.0 : 0.0;
    return;
  }
  const auto e = expected(t);
  std::copy(e.begin(), e.end(), out.begin());
}

std::vector<double> RewardProcess::cumulative_expected(std::size_t rounds) const {
  std::vector<double> total(n_, 0.0);
  auto add = [&](const std::vector<double>& v, double times) {
    for (std::size_t i = 0; i < n_; ++i) total[i] += times * v[i];
  };
  if (const auto* p = std::get_if<PiecewiseStochastic>(&regime_)) {
    const std::size_t full = rounds / p->window;
    for (std::size_t w = 0; w < p->means.size() && w < full; ++w)
      add(p->means[w], static_cast<double>((full - w + p->means.size() - 1) / p->means.size()) *
                           static_cast<double>(p->window));
    if (rounds % p->window) add(p->means[full % p->means.size()], static_cast<double>(rounds % p->window));
    return total;
  }
  if (std::holds_alternative<AdversarialSequence>(regime_)) {
    for (std::size_t t = 1; t <= rounds; ++t) add(expected(t), 1.0);
    return total;
  }
  if (rounds > 0) add(expected(1), static_cast<double>(rounds));
  return total;
}

Seeds Seeds::from_master(std::uint64_t master) {
  return {derive_seed(master, 1), derive_seed(master, 2), derive_seed(master, 3)};
}

std::span<const std::uint32_t> RunTrace::menu_at(std::size_t round_index) const {
  return std::span<const std::uint32_t>(menus).subspan(round_index * k, k);
}

double RunTrace::total_reward(std::size_t upto) const {
  if (upto > rewards.size()) throw InvalidInput("trace is shorter than requested");
  return std::accumulate(rewards.begin(), rewards.begin() + static_cast<std::ptrdiff_t>(upto), 0.0);
}

Episode::Episode(const PreferenceModel& model, std::size_t k, double gamma, RewardProcess rewards,
                 std::size_t horizon, Seeds seeds, EpisodeOptions options)
    : model_(&model),
      k_(k),
      horizon_(horizon),
      rewards_(std::move(rewards)),
      memory_(MemoryState::primed(model.n(), gamma, options.initial_memory, options.prime_weight)),
      agent_rng_(seeds.agent),
      algorithm_rng_(seeds.algorithm),
      snapshot_every_(options.snapshot_every ? options.snapshot_every
                                             : std::max<std::size_t>(1, (horizon + 9999) / 10000)),
      scratch_v_(model.n()),
      scratch_f_(model.n()),
      scratch_r_(model.n()) {
  if (k < 1 || k > model.n()) throw InvalidInput("menu size k must satisfy 1 <= k <= n");
  if (rewards_.n() != model.n()) throw InvalidInput("reward process dimension does not match model");
  trace_.n = model.n();
  trace_.k = k;
  trace_.horizon = horizon;
  trace_.gamma = gamma;
  trace_.seeds = seeds;
  trace_.menus.reserve(horizon * k);
  trace_.chosen.reserve(horizon);
  trace_.rewards.reserve(horizon);
  trace_.snapshots.push_back({0, memory_.vector()});
}

Episode::Outcome Episode::play(const Menu& menu) {
  if (done()) throw ProtocolViolation("episode horizon exhausted");
  if (menu.size() != k_) throw ProtocolViolation("menu has wrong size");
  for (std::size_t i : menu.items())
    if (i >= n()) throw ProtocolViolation("menu item out of range");
  const std::size_t t = rounds_played() + 1;
  memory_.vector_into(scratch_v_);
  model_->scores_into(scratch_v_, scratch_f_);
  const std::size_t chosen = agent_choose_with_scores(scratch_f_, menu, agent_rng_);
  rewards_.draw(t, scratch_r_);
  const double reward = scratch_r_[chosen];
  memory_.update(chosen);
  for (std::size_t i : menu.items()) trace_.menus.push_back(static_cast<std::uint32_t>(i));
  trace_.chosen.push_back(static_cast<std::uint32_t>(chosen));
  trace_.rewards.push_back(reward);
  if (t % snapshot_every_ == 0) trace_.snapshots.push_back({t, memory_.vector()});
  return {chosen, reward};
}

void Episode::annotate_stage(StageRecord record) { trace_.stages.push_back(std::move(record)); }

RunTrace Episode::finish() { return std::move(trace_); }

RunTrace run_episode(const PreferenceModel& model, std::size_t k, double gamma,
                     RewardProcess rewards, Recommender& recommender, std::size_t horizon,
                     Seeds seeds, EpisodeOptions options) {
  Episode ep(model, k, gamma, std::move(rewards), horizon, seeds, std::move(options));
  std::vector<double> v(model.n());
  while (!ep.done()) {
    ep.memory().vector_into(v);
    const RoundContext ctx{ep.rounds_played() + 1, v, ep.algorithm_rng()};
    const Menu menu = recommender.next_menu(ctx);
    const auto out = ep.play(menu);
    recommender.observe(menu, out.chosen, out.reward);
  }
  return ep.finish();
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_trace(std::ostream& out, const RunTrace& trace) {
  out << "# menurec trace v1\n";
  out << "# n=" << trace.n << " k=" << trace.k << " T=" << trace.horizon
      << " gamma=" << format_number(trace.gamma) << " seed_agent=" << trace.seeds.agent
      << " seed_rewards=" << trace.seeds.rewards << " seed_algorithm=" << trace.seeds.algorithm
      << "\n";
  out << "# R t menu chosen reward | S t v... | G kind start length value target...\n";
  std::size_t snap = 0;
  auto flush_snapshots = [&](std::size_t upto) {
    while (snap < trace.snapshots.size() && trace.snapshots[snap].round <= upto) {
      const auto& s = trace.snapshots[snap++];
      out << "S\t" << s.round;
      for (double v : s.memory) out << '\t' << format_number(v);
      out << '\n';
    }
  };
  flush_snapshots(0);
  for (std::size_t r = 0; r < trace.rounds(); ++r) {
    out << "R\t" << (r + 1) << '\t';
    const auto m = trace.menu_at(r);
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out << ',';
      out << m[j];
    }
    out << '\t' << trace.chosen[r] << '\t' << format_number(trace.rewards[r]) << '\n';
    flush_snapshots(r + 1);
  }
  flush_snapshots(static_cast<std::size_t>(-1));
  for (const auto& g : trace.stages) {
    out << "G\t" << g.kind << '\t' << g.start << '\t' << g.length << '\t' << format_number(g.value);
    for (double v : g.target) out << '\t' << format_number(v);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::uint64_t parse_u64(const std::string& s) { return std::stoull(s); }

}  // namespace

RunTrace read_trace(std::istream& in) {
  RunTrace trace;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw InvalidInput("trace line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string tok;
      while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "n") trace.n = std::stoul(val);
        else if (key == "k") trace.k = std::stoul(val);
        else if (key == "T") trace.horizon = std::stoul(val);
        else if (key == "gamma") trace.gamma = std::stod(val);
        else if (key == "seed_agent") trace.seeds.agent = parse_u64(val);
        else if (key == "seed_rewards") trace.seeds.rewards = parse_u64(val);
        else if (key == "seed_algorithm") trace.seeds.algorithm = parse_u64(val);
      }
      continue;
    }
    const auto f = split(line, '\t');
    if (f[0] == "R") {
      if (f.size() != 5) fail("round record needs 5 fields");
      if (std::stoul(f[1]) != trace.rounds() + 1) fail("rounds out of order");
      const auto items = split(f[2], ',');
      if (items.size() != trace.k) fail("menu size does not match header");
      for (const auto& it : items) trace.menus.push_back(static_cast<std::uint32_t>(std::stoul(it)));
      trace.chosen.push_back(static_cast<std::uint32_t>(std::stoul(f[3])));
      trace.rewards.push_back(std::stod(f[4]));
    } else if (f[0] == "S") {
      if (f.size() != trace.n + 2) fail("snapshot needs n values");
      Snapshot s;
      s.round = std::stoul(f[1]);
      for (std::size_t i = 2; i < f.size(); ++i) s.memory.push_back(std::stod(f[i]));
      trace.snapshots.push_back(std::move(s));
    } else if (f[0] == "G") {
      if (f.size() < 5) fail("stage record needs at least 5 fields");
      StageRecord g;
      g.kind = f[1];
      g.start = std::stoul(f[2]);
      g.length = std::stoul(f[3]);
      g.value = std::stod(f[4]);
      for (std::size_t i = 5; i < f.size(); ++i) g.target.push_back(std::stod(f[i]));
      trace.stages.push_back(std::move(g));
    } else {
      fail("unknown record type '" + f[0] + "'");
    }
  }
  return trace;
}

}  // namespace menurec
