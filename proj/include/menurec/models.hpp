#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace menurec {

using ScoreVector = std::vector<double>;

// Declared class constants. Absent entries mean "not declared".
struct ClassMeta {
  double lambda = 0.0;
  std::optional<double> lipschitz;
  std::optional<double> constant_sum;
  std::optional<double> sigma;
};

// Scores f_i(v) for every memory vector v in the simplex. Immutable and safe
// to evaluate concurrently.
class PreferenceModel {
 public:
  using ScoreFn = std::function<void(std::span<const double> v, std::span<double> out)>;

  PreferenceModel(std::string family, std::size_t n, ClassMeta meta, ScoreFn fn,
                  bool memoryless = false);

  std::size_t n() const { return n_; }
  const std::string& family() const { return family_; }
  const ClassMeta& meta() const { return meta_; }
  bool memoryless() const { return memoryless_; }

  ScoreVector scores(std::span<const double> v) const;
  void scores_into(std::span<const double> v, std::span<double> out) const;

 private:
  std::string family_;
  std::size_t n_;
  ClassMeta meta_;
  ScoreFn fn_;
  bool memoryless_;
};

// Column-stochastic n x n matrix, row-major.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> data;

  static Matrix identity(std::size_t n);
  // (1-w) I + w * (1/n) 11^T
  static Matrix uniform_mixing(std::size_t n, double w = 1.0);
  double operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }
};

PreferenceModel make_linear_mix_model(std::size_t n, double lambda, const Matrix& a);
PreferenceModel make_pseudo_increasing_model(std::size_t n, double lambda, double beta,
                                             const Matrix& a);
PreferenceModel make_constant_model(ScoreVector scores);

// Undirected simple graph on vertices 0..m-1, adjacency matrix form.
struct Graph {
  std::size_t vertices = 0;
  std::vector<std::uint8_t> adjacency;

  explicit Graph(std::size_t m = 0) : vertices(m), adjacency(m * m, 0) {}
  void add_edge(std::size_t a, std::size_t b);
  bool adjacent(std::size_t a, std::size_t b) const { return adjacency[a * vertices + b] != 0; }
};

// Item 0 is the reward item; items 1..m are the graph vertices.
PreferenceModel make_mis_model(const Graph& g, double lambda, double eps_interp = 0.01);

// Truncated-history state map and per-state boosted groups of the lottery
// construction. Pure function of (n, gamma, seed).
class LotteryModelInfo {
 public:
  LotteryModelInfo(std::size_t n, double gamma, std::uint64_t seed);

  std::size_t n() const { return n_; }
  std::size_t k() const { return n_ / 2; }
  double lambda() const { return 1.0 / static_cast<double>(n_ - k() + 1); }
  double gamma() const { return gamma_; }
  std::size_t history_length() const { return h_; }

  // The most recent h selections (most recent first) whose discounted
  // footprint is l1-nearest to v.
  std::vector<std::size_t> state_of(std::span<const double> v) const;
  // The k-2 items with score lambda besides item 0, sorted.
  std::vector<std::size_t> group(std::span<const std::size_t> state) const;
  ScoreVector scores_at_state(std::span<const std::size_t> state) const;

  // Footprint of a history: sum_s gamma^s e_{state[s]} normalized by the
  // history weight, as in the memory recurrence.
  std::vector<double> footprint(std::span<const std::size_t> state) const;

 private:
  std::size_t n_;
  double gamma_;
  std::uint64_t seed_;
  std::size_t h_;
};

inline constexpr std::size_t kLotteryStateCap = 2'000'000;

PreferenceModel make_lottery_model(std::size_t n, double gamma, std::uint64_t seed);

struct ClassSpec {
  std::string name;  // "smooth", "pseudo-increasing", "constant", or "any"
  double lambda = 0.0;
  std::optional<double> constant_sum;
  std::optional<double> sigma;
  std::optional<double> lipschitz;

  static ClassSpec declared(const PreferenceModel& model);
};

struct ClassReport {
  std::string class_name;
  double max_violation = 0.0;
  std::vector<double> witness_vector;
  std::size_t grid_size = 0;
  double range_violation = 0.0;
  double sum_violation = 0.0;
  double sigma_violation = 0.0;
  double lipschitz_violation = 0.0;
  double empirical_lipschitz = 0.0;

  bool passed() const { return max_violation == 0.0; }
};

// Violations at or below this are reported as zero.
inline constexpr double kClassTolerance = 1e-9;

ClassReport verify_class(const PreferenceModel& model, const ClassSpec& spec,
                         double grid_resolution);
// Single-threaded reference for the grid scan.
ClassReport verify_class_serial(const PreferenceModel& model, const ClassSpec& spec,
                                double grid_resolution);

// Grid points: compositions of m = round(1/resolution) into n parts.
std::size_t simplex_grid_size(std::size_t n, std::size_t m);

}  // namespace menurec
