#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "doctest.h"
#include "menurec/error.hpp"
#include "menurec/learn.hpp"

using namespace menurec;

namespace {

double dotp(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct BanditRun {
  double total = 0.0;   // sum of r . y_t
  double regret = 0.0;  // T max r - total
};

// Deterministic linear rewards r . y_t over the simplex; `perturb` subtracts an
// oblivious sequence of size at most T^(-1/4) from the feedback.
BanditRun linear_bandit(const std::vector<double>& r, std::size_t horizon, std::uint64_t seed,
                        bool perturb, RcfkmOptions opts = {}) {
  Rcfkm alg(SetDescriptor::simplex(r.size()), horizon, opts);
  Rng rng(seed);
  BanditRun out;
  const double eps = std::pow(static_cast<double>(horizon), -0.25);
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto& y = alg.next(rng);
    const double value = dotp(r, y);
    out.total += value;
    double fb = value;
    if (perturb) fb -= eps * (((t / 97) % 2 == 0) ? 1.0 : 0.0);
    alg.update(fb);
  }
  out.regret = static_cast<double>(horizon) * *std::max_element(r.begin(), r.end()) - out.total;
  return out;
}

}  // namespace

TEST_CASE("burn-in: length and accounting") {
  CHECK(burn_in_length(10000, 0.5) == 100);
  CHECK(burn_in_length(1000000, 1.0 / 3.0) == 100);
  CHECK(burn_in_length(5, 0.0) == 1);
  CHECK(std::pow(0.99, 100.0) <= 0.5);

  const auto model = make_constant_model({0.5, 0.4, 0.3, 0.2});
  Episode ep(model, 2, 0.99, RewardProcess(FixedRewards{{0, 0, 0, 0}}, 4, 0), 500, Seeds{1, 2, 3});
  CHECK(burn_in(ep, 100) == 100);
  CHECK(ep.rounds_played() == 100);
  const auto trace = ep.finish();
  REQUIRE(trace.stages.size() == 1);
  CHECK(trace.stages[0].kind == "burn_in");
  CHECK(trace.stages[0].start == 1);
  CHECK(trace.stages[0].length == 100);
  // uniform random menus: every pair appears
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t r = 0; r < trace.rounds(); ++r) {
    const auto m = trace.menu_at(r);
    pairs.insert({m[0], m[1]});
  }
  CHECK(pairs.size() == 6);
}

TEST_CASE("random menus are uniform over k-subsets") {
  Rng rng(5);
  std::map<std::string, int> counts;
  for (int i = 0; i < 60000; ++i) counts[random_menu(rng, 5, 2).to_string()]++;
  CHECK(counts.size() == 10);
  for (const auto& [menu, c] : counts) CHECK(std::abs(c / 60000.0 - 0.1) <= 0.006);
}

TEST_CASE("query plan: cells and padding") {
  const auto even = make_query_plan(5, 3);
  REQUIRE(even.cells.size() == 2);
  CHECK(even.cells[0] == std::vector<std::size_t>{1, 2});
  CHECK(even.cells[1] == std::vector<std::size_t>{3, 4});
  CHECK(even.padding_per_cell[1] == 0);

  const auto padded = make_query_plan(6, 3);
  REQUIRE(padded.cells.size() == 3);
  CHECK(padded.cells[2] == std::vector<std::size_t>{5, 1});
  CHECK(padded.padding_per_cell[2] == 1);

  CHECK_THROWS_AS(make_query_plan(4, 1), InvalidInput);
}

TEST_CASE("query: sample-size requirement") {
  // ceil((1 / 0.0002) * log(800))
  CHECK(query_min_cell_rounds(4, 0.01, 0.01) == static_cast<std::size_t>(std::ceil(5000.0 * std::log(800.0))));
  CHECK(query_min_cell_rounds(4, 0.01, 0.01) == 33424);
  const double a = query_alpha(4, 2, 3 * 33424, 0.01);
  CHECK(a <= 0.01 + 1e-12);

  const auto model = make_constant_model({0.6, 0.3, 0.2, 0.1});
  Episode ep(model, 2, 0.9, RewardProcess(FixedRewards{{0, 0, 0, 0}}, 4, 0), 100000, Seeds{});
  CHECK_THROWS_AS(query_scores(ep, 1000, 0.01, 0.01), InfeasibleParameters);
  CHECK(ep.rounds_played() == 0);
}

TEST_CASE("query: constant model score ratios") {
  const auto model = make_constant_model({0.6, 0.3, 0.2, 0.1});
  Episode ep(model, 2, 0.9, RewardProcess(FixedRewards{{0, 0, 0, 0}}, 4, 0), 30000, Seeds::from_master(8));
  const auto est = query_scores(ep, 30000, 0.02, 0.05);
  CHECK(ep.rounds_played() == 30000);
  const std::vector<double> expect = {1.0, 0.5, 1.0 / 3.0, 1.0 / 6.0};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(est.tilde_f[i] - expect[i]) <= 0.02);
  CHECK(*std::max_element(est.tilde_f.begin(), est.tilde_f.end()) == 1.0);

  const auto trace = ep.finish();
  REQUIRE(trace.stages.size() == 1);
  CHECK(trace.stages[0].kind == "query");
  CHECK(trace.stages[0].length == 30000);
  for (std::size_t r = 0; r < trace.rounds(); ++r) CHECK(trace.menu_at(r)[0] == 0);
}

TEST_CASE("query: equal scores estimate to one; max entry is normalized") {
  const auto model = make_constant_model({0.4, 0.4, 0.4, 0.4, 0.4});
  Episode ep(model, 3, 0.5, RewardProcess(FixedRewards{{0, 0, 0, 0, 0}}, 5, 0), 20000, Seeds::from_master(3));
  const double alpha = query_alpha(5, 3, 20000, 0.05);
  const auto est = query_scores(ep, 20000, alpha, 0.05);
  // Frequencies p = 1/3 are within alpha; the ratio of two of them moves by at
  // most alpha (1 + w) / (p - alpha), and normalization can double that.
  const double band = 2.0 * alpha * 2.0 / (1.0 / 3.0 - alpha);
  for (double f : est.tilde_f) CHECK(std::abs(f - 1.0) <= band);
  CHECK(*std::max_element(est.tilde_f.begin(), est.tilde_f.end()) == 1.0);
  for (double f : est.clamped(0.9)) CHECK(f >= 0.9);
}

TEST_CASE("query: padding keeps per-item counts and the pivot can be overtaken") {
  // Item 3 has the top score, so normalization divides by its estimate.
  const auto model = make_constant_model({0.3, 0.2, 0.15, 0.6, 0.1, 0.3});
  Episode ep(model, 3, 0.5, RewardProcess(FixedRewards{std::vector<double>(6, 0.0)}, 6, 0), 60000,
             Seeds::from_master(4));
  const auto est = query_scores(ep, 60000, 0.02, 0.05);
  const std::vector<double> expect = {0.5, 1.0 / 3.0, 0.25, 1.0, 1.0 / 6.0, 0.5};
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(est.tilde_f[i] - expect[i]) <= 0.04);
  CHECK(est.tilde_f[3] == 1.0);
}

TEST_CASE("query: failure rate of the 2 alpha band on a constant model") {
  const std::vector<double> s = {0.6, 0.3, 0.2, 0.1};
  const auto model = make_constant_model(s);
  const double delta = 0.05;
  const std::size_t t_query = 3000;
  const double alpha = query_alpha(4, 2, t_query, delta);
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Episode ep(model, 2, 0.9, RewardProcess(FixedRewards{{0, 0, 0, 0}}, 4, 0), t_query,
               Seeds::from_master(1000 + trial));
    const auto est = query_scores(ep, t_query, alpha, delta);
    bool ok = true;
    for (std::size_t i = 0; i < 4; ++i) ok = ok && std::abs(est.tilde_f[i] - s[i] / 0.6) <= 2 * alpha;
    failures += ok ? 0 : 1;
  }
  CHECK(failures <= static_cast<int>(delta * 200));
}

TEST_CASE("sum-zero sphere directions") {
  Rng rng(1);
  std::vector<double> mean(5, 0.0);
  for (int i = 0; i < 20000; ++i) {
    const auto u = sum_zero_sphere_direction(5, rng);
    CHECK(std::abs(std::accumulate(u.begin(), u.end(), 0.0)) <= 1e-12);
    CHECK(std::sqrt(dotp(u, u)) == doctest::Approx(1.0));
    for (std::size_t j = 0; j < 5; ++j) mean[j] += u[j] / 20000.0;
  }
  for (double m : mean) CHECK(std::abs(m) <= 0.02);
}

TEST_CASE("rcfkm: no exploration emits the iterate") {
  RcfkmOptions opts;
  opts.delta_scale = 0.0;
  Rcfkm alg(SetDescriptor::simplex(4), 1000, opts);
  Rng rng(2);
  const auto y = alg.next(rng);
  CHECK(y == alg.iterate());
  for (double x : y) CHECK(x == doctest::Approx(0.25));
}

TEST_CASE("rcfkm: emitted points surround the iterate") {
  Rcfkm alg(SetDescriptor::simplex(4), 10000);
  Rng rng(3);
  const auto x = alg.iterate();
  const double d = alg.effective_delta();
  CHECK(d == doctest::Approx(RcfkmOptions{}.delta_scale * std::pow(10000.0, -0.25)));
  CHECK(alg.xi() == doctest::Approx(d * std::sqrt(12.0)));
  std::vector<double> mean(4, 0.0);
  for (int i = 0; i < 10000; ++i) {
    const auto y = alg.next(rng);
    double dist = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      dist += (y[j] - x[j]) * (y[j] - x[j]);
      mean[j] += y[j] / 10000.0;
    }
    CHECK(std::sqrt(dist) <= d + 1e-12);
    CHECK(alg.set().contains(y, 1e-12));
    alg.update(0.0);
    REQUIRE(alg.iterate() == x);  // zero rewards with baseline 0: no movement
  }
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(mean[j] - x[j]) <= 3 * d / 100.0);
}

TEST_CASE("rcfkm: iterate never leaves the shrunk set") {
  Rcfkm alg(SetDescriptor::smoothed_simplex(0.2, 4), 2000);
  Rng rng(4), noise(5);
  for (int t = 0; t < 2000; ++t) {
    const auto y = alg.next(rng);
    CHECK(alg.set().contains(y, 1e-9));
    alg.update(noise.uniform());
    CHECK(alg.shrunk_set().contains(alg.iterate(), 1e-9));
  }
  CHECK(alg.steps() == 2000);
  CHECK(alg.steps_remaining() == 0);
}

TEST_CASE("rcfkm: rewards outside [0,1] are clamped and counted") {
  Rcfkm alg(SetDescriptor::simplex(3), 100);
  Rng rng(6);
  alg.next(rng);
  alg.update(1.7);
  alg.next(rng);
  alg.update(-0.2);
  CHECK(alg.clamped_rewards() == 2);
  CHECK_THROWS_AS(alg.update(0.5), InvalidInput);
}

TEST_CASE("rcfkm: contraction safety and violations") {
  const std::size_t horizon = 3000;
  Rcfkm alg(SetDescriptor::simplex(4), horizon);
  Rng rng(7), noise(8);
  for (std::size_t t = 0; t < horizon; ++t) {
    const double phi = 0.6 * static_cast<double>(t + 1) / static_cast<double>(horizon);
    const auto set = SetDescriptor::smoothed_simplex(phi, 4).add_halfspace({1, -1, 0, 0},
                                                                           0.2 - 0.1 * phi);
    if (t > 0) alg.contract_to(set);
    const auto y = alg.next(rng);
    REQUIRE(set.contains(y, 1e-8));
    alg.update(noise.uniform());
  }
  CHECK_THROWS_AS(alg.contract_to(SetDescriptor::simplex(4)), ContractViolation);
}

TEST_CASE("rcfkm: fixed linear rewards, average reward near the optimum") {
  const std::vector<double> r = {0.2, 0.5, 0.9, 0.4};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto clean = linear_bandit(r, 100000, seed, false);
    CHECK(clean.total / 100000.0 >= 0.9 - 0.1);
    const auto noisy = linear_bandit(r, 100000, seed, true);
    CHECK(noisy.total / 100000.0 >= 0.9 - 0.15);
  }
}

TEST_CASE("rcfkm: regret against T^(3/4) stays bounded across horizons") {
  const std::vector<double> r = {0.3, 0.8, 0.1, 0.5};
  for (std::size_t horizon : {1000u, 10000u, 100000u}) {
    double mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      mean += linear_bandit(r, horizon, seed, false).regret / 5.0;
    const double scaled = mean / std::pow(static_cast<double>(horizon), 0.75);
    CHECK(scaled <= 5.0);
  }
}

TEST_CASE("exp3: defaults and single arm") {
  Exp3 one(1, 100);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    CHECK(one.next(rng) == 0);
    one.update(0, 0.3);
  }
  Exp3 two(2, 10000);
  CHECK(two.eta() == doctest::Approx(std::sqrt(2 * std::log(2.0) / 20000.0)));
  CHECK(two.mix() == doctest::Approx(std::sqrt(2 * std::log(2.0) / 10000.0)));
  two.update(0, 2.0);
  CHECK(two.clamped_rewards() == 1);
}

TEST_CASE("exp3: concentrates on the rewarding arm") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Exp3 alg(2, 10000);
    Rng rng(seed);
    int late_hits = 0;
    for (int t = 0; t < 10000; ++t) {
      const auto arm = alg.next(rng);
      if (t >= 9000 && arm == 0) ++late_hits;
      alg.update(arm, arm == 0 ? 1.0 : 0.0);
      const auto p = alg.probabilities();
      REQUIRE(std::abs(p[0] + p[1] - 1.0) <= 1e-9);
      REQUIRE(std::min(p[0], p[1]) > 0.0);
    }
    CHECK(late_hits >= 900);
  }
}

TEST_CASE("exp3: identical rewards keep the distribution near uniform") {
  for (double reward : {1.0, 0.95}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Exp3 alg(4, 10000);
      Rng rng(seed);
      double worst = 0.0;
      for (int t = 0; t < 10000; ++t) {
        const auto arm = alg.next(rng);
        alg.update(arm, reward);
        for (double p : alg.probabilities()) worst = std::max(worst, std::abs(p - 0.25));
      }
      CHECK(worst <= 0.1);
    }
  }
}
