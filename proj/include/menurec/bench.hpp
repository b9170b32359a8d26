#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "menurec/core.hpp"
#include "menurec/models.hpp"
#include "menurec/recommend.hpp"
#include "menurec/simulate.hpp"

namespace menurec {

struct BenchmarkResult {
  double value = 0.0;
  std::vector<double> point;  // empty for menu benchmarks
  std::optional<Menu> menu;
};

// Vertex b^{i*} of the smoothed simplex maximizing R . x, ties to lowest index.
BenchmarkResult best_point_smoothed_simplex(std::span<const double> cumulative, double phi);

// LP over x in the simplex with k x_i / f_i(v) <= sum_j x_j / f_j(v) for every v
// in the grid. Exact for constant models; an upper bound otherwise.
BenchmarkResult best_point_eird(std::span<const double> cumulative, const PreferenceModel& model,
                                std::size_t k, std::span<const std::vector<double>> grid);

// Smoothed-simplex vertices for `phi`, the uniform vector and `random_points`
// seeded Dirichlet(1) points.
std::vector<std::vector<double>> default_eird_grid(std::size_t n, double phi,
                                                   std::size_t random_points, std::uint64_t seed);

// Exact enumeration for constant models; ties to the lexicographically
// smallest menu.
BenchmarkResult best_fixed_menu(const PreferenceModel& model, std::size_t k,
                                std::span<const double> cumulative, std::size_t cap = 100000);
BenchmarkResult best_fixed_menu(const PreferenceModel& model, std::size_t k,
                                const RewardProcess& rewards, std::size_t horizon,
                                std::size_t cap = 100000);

// A benchmark set evaluated against cumulative expected rewards.
class Benchmark {
 public:
  enum class Kind { smoothed_simplex, eird, fixed_menus };

  static Benchmark smoothed_simplex(double phi);
  static Benchmark eird(const PreferenceModel& model, std::size_t k,
                        std::vector<std::vector<double>> grid);
  static Benchmark fixed_menus(const PreferenceModel& model, std::size_t k,
                               std::size_t cap = 100000);

  Kind kind() const { return kind_; }
  std::string name() const;
  // EIRD for a non-constant model is only an outer approximation.
  bool is_upper_bound() const { return upper_bound_; }

  BenchmarkResult evaluate(std::span<const double> cumulative) const;

 private:
  Kind kind_ = Kind::smoothed_simplex;
  double phi_ = 0.0;
  const PreferenceModel* model_ = nullptr;
  std::size_t k_ = 0;
  std::size_t cap_ = 0;
  std::vector<std::vector<double>> grid_;
  bool upper_bound_ = false;
};

struct RegretPoint {
  std::size_t t = 0;
  double benchmark_value = 0.0;
  double alg_reward = 0.0;
  double regret = 0.0;
};

struct RegretReport {
  std::string benchmark;
  bool upper_bound = false;
  std::uint64_t seed = 0;
  BenchmarkResult final_benchmark;
  std::vector<RegretPoint> curve;
};

// Regret at each checkpoint against the benchmark of the expected cumulative
// rewards up to that checkpoint. Throws InvalidInput on length or size
// mismatch.
RegretReport regret_curve(const RunTrace& trace, const Benchmark& benchmark,
                          const RewardProcess& rewards, std::span<const std::size_t> checkpoints,
                          std::uint64_t seed = 0);

std::vector<std::size_t> default_checkpoints(std::size_t horizon, std::size_t count = 10);

struct AggregatePoint {
  std::size_t t = 0;
  std::size_t count = 0;
  double mean_regret = 0.0;
  double se_regret = 0.0;
  double mean_regret_over_t = 0.0;
};
std::vector<AggregatePoint> aggregate(std::span<const RegretReport> reports);

// One-sided sign test over paired per-seed series: per consecutive pair of
// horizons, count seeds whose value drops and compute P(Bin(m, 1/2) >= count).
struct TrendTest {
  std::vector<double> means;
  std::vector<std::size_t> decreases;
  std::vector<double> p_values;
  bool means_strictly_decreasing = false;
  bool passed = false;  // strictly decreasing means and every p < alpha
};
TrendTest sign_test_decreasing(const std::vector<std::vector<double>>& per_horizon,
                               double alpha = 0.1);
double binomial_upper_tail(std::size_t m, std::size_t count);

// Experiment configuration (JSON, see README for the schema).
struct ExperimentConfig {
  nlohmann::json model;
  std::size_t k = 2;
  std::size_t horizon = 1000;
  std::optional<double> gamma;
  std::optional<double> c;
  std::string algorithm;
  nlohmann::json algorithm_params = nlohmann::json::object();
  nlohmann::json rewards;
  nlohmann::json benchmark;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::size_t> horizons;     // sweep only; empty means {horizon}
  std::vector<std::size_t> checkpoints;  // empty: default_checkpoints
  std::optional<std::vector<double>> initial_memory;
  bool write_traces = true;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  double gamma_at(std::size_t horizon) const;
  double c_at(std::size_t horizon) const;
};

PreferenceModel build_model(const nlohmann::json& spec);
// A piecewise "window_fraction" is resolved against `horizon`.
RewardProcess build_rewards(const nlohmann::json& spec, std::size_t n, std::uint64_t seed,
                            std::size_t horizon = 0);
Benchmark build_benchmark(const nlohmann::json& spec, const PreferenceModel& model, std::size_t k);

struct CellResult {
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  RunResult run;
  RegretReport report;
};

// One (horizon, seed) cell: build the episode, run the algorithm, compute regret.
CellResult run_cell(const ExperimentConfig& config, const PreferenceModel& model,
                    std::size_t horizon, std::uint64_t seed);

// All (horizon, seed) cells. The parallel version distributes cells over
// OpenMP threads; results are ordered by (horizon, seed) and identical to the
// serial reference.
std::vector<CellResult> run_sweep(const ExperimentConfig& config, int threads = 0);
std::vector<CellResult> run_sweep_serial(const ExperimentConfig& config);

// CSV with header T_checkpoint,seed,regret,benchmark_value,alg_reward.
void write_report_csv(std::ostream& out, std::span<const RegretReport> reports);
void write_report_rows(std::ostream& out, const RegretReport& report);

// key=value lines, keys sorted.
void write_summary(std::ostream& out, const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> summarize(const ExperimentConfig& config,
                                             std::span<const CellResult> cells);

}  // namespace menurec
