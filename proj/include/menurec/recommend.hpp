#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "menurec/learn.hpp"
#include "menurec/models.hpp"
#include "menurec/simulate.hpp"

namespace menurec {

// Precondition handling shared by all algorithms. `strict` rejects runs whose
// declared model class, discount or reward regime does not match the
// algorithm (ConfigurationError before any round). `enforce_regime` also
// rejects the quantitative lambda/phi/sigma inequalities that the analysis
// assumes; they are always reported as diagnostics.
struct Strictness {
  bool strict = true;
  bool enforce_regime = false;
};

// Step and radius scales for RC-FKM fed the reward of a single sampled item
// per round, which is far noisier than the exact linear feedback the learn
// defaults are tuned on.
inline RcfkmOptions sampled_feedback_rcfkm() {
  RcfkmOptions o;
  o.eta_scale = 1.0;
  o.delta_scale = 1.0;
  return o;
}

struct Alg1Params {
  double c = 0.5;
  double rho = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  std::size_t t_burn = 0;
  std::size_t t_query = 0;
  double construction_eps = 0.01;
  double score_floor = 0.0;  // 0: lambda / 2 from the declared class
  double mu_margin = 1e-6;
  RcfkmOptions rcfkm = sampled_feedback_rcfkm();
  Strictness checks;

  // rho = T^(-c/4), beta = rho^2, t_burn = ceil(T^c), t_query = ceil(beta T^c),
  // delta = 1/T^2.
  static Alg1Params defaults(std::size_t horizon, double c);
};

struct Alg2Params {
  double c = 0.5;
  double y = 0.0;
  double z = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  std::size_t t_burn = 0;
  std::size_t t_query = 0;
  std::size_t t_step = 0;
  double phi = 0.0;
  double clamp_radius = 0.0;
  double construction_eps = 0.01;
  double score_floor = 0.0;
  double mu_margin = 1e-6;
  bool stop_on_exit = true;  // end a hold early once v leaves B_rho(v*)
  RcfkmOptions rcfkm;
  Strictness checks;

  // y = 5c/8, z = c/2, t_query = ceil(T^(c-y)), t_step = ceil(T^(c-z)),
  // rho = T^(-z), phi = 4 k lambda sigma^2, clamp radius lambda phi.
  static Alg2Params defaults(std::size_t horizon, double c, std::size_t k, const ClassMeta& meta);
};

struct Alg3Params {
  double alpha0 = 1.0;
  double alpha = 0.0;
  std::size_t t_hold = 0;
  double phi = 0.0;
  Exp3Options exp3;
  Strictness checks;

  // alpha = alpha0 T^(-1/6), t_hold = min(ceil(4 / (alpha^4 (1-gamma))), T/10),
  // phi = 2 lambda k^3 sigma^6.
  static Alg3Params defaults(std::size_t horizon, double gamma, std::size_t k,
                             const ClassMeta& meta, double alpha0 = 1.0);
};

struct MemorylessExp3Params {
  Exp3Options exp3;
  std::size_t menu_cap = 100000;
  Strictness checks;
};

struct MemorylessEstimateParams {
  std::size_t rounds_per_cell = 0;  // 0: ceil(T^(2/3))
  double delta = 0.0;               // 0: 1/T
  double construction_eps = 0.01;
  double score_floor = 0.0;
  double mu_margin = 1e-6;
  RcfkmOptions rcfkm = sampled_feedback_rcfkm();
  Strictness checks;
};

// Alg3 per-pull summary.
struct PullRecord {
  std::size_t arm = 0;
  std::size_t start = 0;  // 1-based
  std::size_t length = 0;
  double average_reward = 0.0;
  double terminal_weight = 0.0;  // memory weight of the held item after the pull
};

struct RunResult {
  RunTrace trace;
  std::map<std::string, double> diagnostics;
  std::vector<PullRecord> pulls;
};

RunResult run_alg1(Episode& episode, const Alg1Params& params);
RunResult run_alg2(Episode& episode, const Alg2Params& params);
RunResult run_alg3(Episode& episode, const Alg3Params& params);
RunResult run_memoryless_exp3(Episode& episode, const MemorylessExp3Params& params);
RunResult run_memoryless_estimate(Episode& episode, const MemorylessEstimateParams& params);

// Choice-rule bounds from the EXP-phi analysis.
struct ExpPhiDiagnostics {
  double p1 = 0.0;      // 1 - k lambda sigma^2
  double p0 = 0.0;      // 1 / (2 sigma^2 k^4)
  double e_star = 0.0;  // 1 / (1 + 2 lambda sigma^6 k^3)
};
ExpPhiDiagnostics exp_phi_diagnostics(double lambda, double sigma, std::size_t k);

// Held item plus the k-1 other items of smallest memory weight, ties by index.
Menu exp_phi_menu(std::size_t held, std::span<const double> memory, std::size_t k);

// gamma = 1 - T^(-c)
double gamma_for(std::size_t horizon, double c);

}  // namespace menurec
