#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "menurec/core.hpp"
#include "menurec/models.hpp"
#include "menurec/rng.hpp"

namespace menurec {

// Discounted selection memory: weighted_sum = sum_s gamma^(t-s) e_{i_s},
// normalizer = sum_s gamma^(t-s). The memory vector is their ratio.
class MemoryState {
 public:
  MemoryState() = default;

  // No selections yet; the memory vector is undefined until the first update.
  static MemoryState empty(std::size_t n, double gamma);
  // Seeded with one pseudo-selection of `initial` (uniform by default) of
  // weight `prime_weight`.
  static MemoryState primed(std::size_t n, double gamma,
                            std::optional<std::vector<double>> initial = std::nullopt,
                            double prime_weight = 1.0);

  void update(std::size_t chosen);

  std::size_t n() const { return weighted_sum_.size(); }
  double gamma() const { return gamma_; }
  std::size_t t() const { return t_; }
  double normalizer() const { return normalizer_; }
  const std::vector<double>& weighted_sum() const { return weighted_sum_; }

  std::vector<double> vector() const;
  void vector_into(std::span<double> out) const;

 private:
  std::vector<double> weighted_sum_;
  double normalizer_ = 0.0;
  double gamma_ = 1.0;
  std::size_t t_ = 0;
};

MemoryState update_memory(MemoryState state, std::size_t chosen);

// Samples from p_{K,v}: f_i / sum_{j in K} f_j over the menu.
std::size_t agent_choose(const PreferenceModel& model, const MemoryState& state, const Menu& menu,
                         Rng& rng);
std::size_t agent_choose_with_scores(std::span<const double> scores, const Menu& menu, Rng& rng);

struct FixedRewards {
  std::vector<double> values;
};
// Independent Bernoulli rewards; means[w] applies to window w (cycling).
struct PiecewiseStochastic {
  std::size_t window = 1;
  std::vector<std::vector<double>> means;
};
struct AdversarialSequence {
  std::vector<std::vector<double>> rounds;
};
struct ItemIndicator {
  std::size_t item = 0;
};
using RewardRegime = std::variant<FixedRewards, PiecewiseStochastic, AdversarialSequence, ItemIndicator>;

// Every round draws the full reward vector, so the random stream does not
// depend on what the recommender does.
class RewardProcess {
 public:
  RewardProcess(RewardRegime regime, std::size_t n, std::uint64_t seed);

  std::size_t n() const { return n_; }
  const RewardRegime& regime() const { return regime_; }

  // Round t is 1-based.
  void draw(std::size_t t, std::span<double> out);
  std::vector<double> expected(std::size_t t) const;
  // sum_{t=1}^{rounds} E[r_t]
  std::vector<double> cumulative_expected(std::size_t rounds) const;

 private:
  RewardRegime regime_;
  std::size_t n_;
  Rng rng_;
};

struct Seeds {
  std::uint64_t agent = 0;
  std::uint64_t rewards = 0;
  std::uint64_t algorithm = 0;

  static Seeds from_master(std::uint64_t master);
  friend bool operator==(const Seeds&, const Seeds&) = default;
};

struct StageRecord {
  std::string kind;
  std::size_t start = 0;  // first round of the stage, 1-based
  std::size_t length = 0;
  std::vector<double> target;
  double value = 0.0;
};

struct Snapshot {
  std::size_t round = 0;  // memory after this many rounds
  std::vector<double> memory;
};

struct RunTrace {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t horizon = 0;
  double gamma = 0.0;
  Seeds seeds;
  std::vector<std::uint32_t> menus;  // k entries per round
  std::vector<std::uint32_t> chosen;
  std::vector<double> rewards;
  std::vector<Snapshot> snapshots;
  std::vector<StageRecord> stages;

  std::size_t rounds() const { return chosen.size(); }
  std::span<const std::uint32_t> menu_at(std::size_t round_index) const;
  double total_reward(std::size_t upto) const;
};

struct EpisodeOptions {
  std::optional<std::vector<double>> initial_memory;
  double prime_weight = 1.0;
  std::size_t snapshot_every = 0;  // 0: ceil(T / 10^4)
};

// One agent, one reward process, T rounds. Recommenders see the memory
// vector and the realized reward of the chosen item only.
class Episode {
 public:
  struct Outcome {
    std::size_t chosen;
    double reward;
  };

  Episode(const PreferenceModel& model, std::size_t k, double gamma, RewardProcess rewards,
          std::size_t horizon, Seeds seeds, EpisodeOptions options = {});

  Outcome play(const Menu& menu);

  std::size_t n() const { return model_->n(); }
  std::size_t k() const { return k_; }
  double gamma() const { return memory_.gamma(); }
  std::size_t horizon() const { return horizon_; }
  std::size_t rounds_played() const { return trace_.chosen.size(); }
  std::size_t remaining() const { return horizon_ - rounds_played(); }
  bool done() const { return remaining() == 0; }

  // Declared class constants of the agent's model; algorithms never see scores.
  const ClassMeta& declared_class() const { return model_->meta(); }
  bool memoryless_model() const { return model_->memoryless(); }

  const MemoryState& memory() const { return memory_; }
  std::vector<double> memory_vector() const { return memory_.vector(); }
  Rng& algorithm_rng() { return algorithm_rng_; }
  const RewardProcess& rewards() const { return rewards_; }

  void annotate_stage(StageRecord record);
  RunTrace finish();

 private:
  const PreferenceModel* model_;
  std::size_t k_;
  std::size_t horizon_;
  RewardProcess rewards_;
  MemoryState memory_;
  Rng agent_rng_;
  Rng algorithm_rng_;
  std::size_t snapshot_every_;
  RunTrace trace_;
  std::vector<double> scratch_v_, scratch_f_, scratch_r_;
};

struct RoundContext {
  std::size_t t;  // 1-based
  std::span<const double> memory;
  Rng& rng;
};

class Recommender {
 public:
  virtual ~Recommender() = default;
  virtual Menu next_menu(const RoundContext& ctx) = 0;
  virtual void observe(const Menu& menu, std::size_t chosen, double reward) = 0;
};

// Always the same menu.
class FixedMenuRecommender : public Recommender {
 public:
  explicit FixedMenuRecommender(Menu menu) : menu_(std::move(menu)) {}
  Menu next_menu(const RoundContext&) override { return menu_; }
  void observe(const Menu&, std::size_t, double) override {}

 private:
  Menu menu_;
};

RunTrace run_episode(const PreferenceModel& model, std::size_t k, double gamma,
                     RewardProcess rewards, Recommender& recommender, std::size_t horizon,
                     Seeds seeds, EpisodeOptions options = {});

// Line format, tab separated:
//   R  t  menu(comma-joined)  chosen  reward
//   S  t  v_1 ... v_n
//   G  kind  start  length  value  target_1 ... target_m
// Header lines start with '#'. Rounds are 1-based, items 0-based.
void write_trace(std::ostream& out, const RunTrace& trace);
RunTrace read_trace(std::istream& in);

std::string format_number(double x);  // "%.9g"

}  // namespace menurec
