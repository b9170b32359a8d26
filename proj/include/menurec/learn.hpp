#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "menurec/core.hpp"
#include "menurec/projection.hpp"
#include "menurec/rng.hpp"
#include "menurec/simulate.hpp"

namespace menurec {

// Uniformly random k-subset of {0..n-1}.
Menu random_menu(Rng& rng, std::size_t n, std::size_t k);

// ceil(T^c), at least 1.
std::size_t burn_in_length(std::size_t horizon, double c);

// Plays `rounds` uniformly random menus (fewer if the episode ends first) and
// records a "burn_in" stage. Returns the number of rounds played.
std::size_t burn_in(Episode& episode, std::size_t rounds);

// Pivot item 0 is shown every round; items 1..n-1 are split into cells of
// k-1. The last cell is padded with items from earlier cells; observations of
// padding items are discarded.
struct QueryPlan {
  std::size_t pivot = 0;
  std::vector<std::vector<std::size_t>> cells;
  std::vector<std::size_t> padding_per_cell;  // trailing entries that are padding
};
QueryPlan make_query_plan(std::size_t n, std::size_t k);

// Smallest per-cell sample size w' with w' >= log(2n/delta) / (2 alpha^2).
std::size_t query_min_cell_rounds(std::size_t n, double alpha, double delta);
// Confidence radius achieved by t_query rounds.
double query_alpha(std::size_t n, std::size_t k, std::size_t t_query, double delta);

struct ModelEstimate {
  std::vector<double> center;   // memory vector when the query started
  std::vector<double> tilde_f;  // normalized, max entry 1
  double alpha = 0.0;
  double delta = 0.0;
  std::size_t rounds = 0;

  // Entries clamped below at `floor` (typically lambda/2).
  std::vector<double> clamped(double floor) const;
};

// Plays exactly t_query rounds, cycling through the cells. Throws
// InfeasibleParameters before playing if t_query cannot reach (alpha, delta),
// or if fewer than t_query rounds remain.
ModelEstimate query_scores(Episode& episode, std::size_t t_query, double alpha, double delta);

struct RcfkmOptions {
  double eta_scale = 2.0;    // eta = eta_scale * H^(-3/4)
  double delta_scale = 0.5;  // delta = delta_scale * H^(-1/4)
  bool baseline = true;      // subtract a running reward average in the gradient estimate
  // Small multiplicative margin so that emitted points stay strictly inside.
  double interior_margin = 1e-9;
  // Upper bound on the shrink factor xi; thin sets then get a smaller delta
  // instead of collapsing toward their center.
  double max_xi = 1.0;
};

// One-point bandit gradient ascent over a contracting sequence of convex
// subsets of the simplex. Iterates live in the set shrunk by xi toward its
// inscribed center; emitted points are iterate + delta u, u uniform on the
// unit sphere of the sum-zero subspace, so they stay in the unshrunk set.
class Rcfkm {
 public:
  Rcfkm(SetDescriptor set, std::size_t horizon, RcfkmOptions options = {},
        std::optional<std::vector<double>> start = std::nullopt);

  // Next action. Calling twice without an update returns the same point.
  const std::vector<double>& next(Rng& rng);
  // Reward observed for the last emitted point. Rewards are clamped to [0,1].
  void update(double reward);
  void update(double reward, const SetDescriptor& next_set);
  // Replaces the feasible set by a subset. Throws ContractViolation when the
  // new set is not structurally inside the current one.
  void contract_to(const SetDescriptor& next_set);

  std::size_t dimension() const { return set_.dimension(); }
  const SetDescriptor& set() const { return set_; }
  const SetDescriptor& shrunk_set() const { return shrunk_; }
  const std::vector<double>& iterate() const { return iterate_; }
  const std::vector<double>& direction() const { return u_; }
  double eta() const { return eta_; }
  double delta() const { return delta_; }
  double effective_delta() const { return delta_eff_; }
  double xi() const { return xi_; }
  double inscribed_radius() const { return ball_.radius; }
  std::size_t horizon() const { return horizon_; }
  std::size_t steps() const { return steps_; }
  std::size_t steps_remaining() const { return steps_ < horizon_ ? horizon_ - steps_ : 0; }
  std::size_t clamped_rewards() const { return clamped_; }

 private:
  void rebuild_geometry();

  SetDescriptor set_;
  SetDescriptor shrunk_;
  InscribedBall ball_;
  std::size_t horizon_;
  RcfkmOptions options_;
  double eta_ = 0.0;
  double delta_ = 0.0;
  double delta_eff_ = 0.0;
  double xi_ = 0.0;
  std::vector<double> iterate_;
  std::vector<double> u_;
  std::vector<double> emitted_;
  bool pending_ = false;
  double baseline_ = 0.0;
  std::size_t steps_ = 0;
  std::size_t clamped_ = 0;
};

// Uniform direction on the unit sphere of {u : sum u = 0} in R^n.
std::vector<double> sum_zero_sphere_direction(std::size_t n, Rng& rng);

struct Exp3Options {
  double eta = 0.0;   // 0: sqrt(2 ln K / (K P))
  double mix = -1.0;  // < 0: min(0.05, sqrt(K ln K / P))
};

// Exponential weights over K arms with importance-weighted loss estimates
// (1 - r) / p. Sampling mixes in `mix` of the uniform distribution.
class Exp3 {
 public:
  Exp3(std::size_t arms, std::size_t horizon, Exp3Options options = {});

  std::size_t next(Rng& rng);
  void update(std::size_t arm, double reward);

  std::size_t arms() const { return losses_.size(); }
  double eta() const { return eta_; }
  double mix() const { return mix_; }
  std::size_t rounds() const { return rounds_; }
  std::size_t clamped_rewards() const { return clamped_; }
  std::vector<double> probabilities() const;
  // Cumulative estimated rewards, t - L_i.
  std::vector<double> estimated_rewards() const;

 private:
  std::vector<double> losses_;  // cumulative estimated losses L_i
  double eta_;
  double mix_;
  std::size_t rounds_ = 0;
  std::size_t clamped_ = 0;
};

}  // namespace menurec
