#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "menurec/core.hpp"
#include "menurec/models.hpp"

namespace menurec {

inline constexpr double kIrdTolerance = 1e-9;
inline constexpr double kOracleTolerance = 1e-7;
inline constexpr std::size_t kOracleMaxItems = 12;

// mu_i = k (x_i / f_i) / sum_j (x_j / f_j). Throws InvalidModel on a
// non-positive score.
std::vector<double> menu_times(std::span<const double> x, std::span<const double> scores,
                               std::size_t k);

bool ird_contains(std::span<const double> x, std::span<const double> scores, std::size_t k);

// Convex-hull LP over all C(n,k) menu-conditional distributions.
bool ird_contains_oracle(std::span<const double> x, std::span<const double> scores,
                         std::size_t k);

// Choice distribution p_{K,v} over all n items for a single menu.
std::vector<double> menu_choice_probs(const Menu& menu, std::span<const double> scores);

ItemDistribution induced_item_distribution(const MenuDistribution& z,
                                           std::span<const double> scores);

struct MenuConstruction {
  MenuDistribution distribution;
  std::size_t stages = 0;
};

// Greedy staged construction: ceil(n / (eps k^2)) stages, each showing the k
// eligible items with the largest remaining menu time. Throws NotRealizable
// when x is outside IRD.
MenuConstruction build_menu_construction(std::span<const double> x,
                                         std::span<const double> scores, std::size_t k,
                                         double epsilon);
MenuDistribution build_menu_distribution(std::span<const double> x,
                                         std::span<const double> scores, std::size_t k,
                                         double epsilon);

bool eird_contains_grid(std::span<const double> x, const PreferenceModel& model, std::size_t k,
                        std::span<const std::vector<double>> grid);

// Normals a_i with a_i . x <= 0 iff mu_i <= 1 - margin, one per item:
// k x_i / f_i - (1 - margin) sum_j x_j / f_j <= 0.
std::vector<std::vector<double>> menu_time_normals(std::span<const double> scores,
                                                   std::size_t k, double margin = 0.0);

// All k-subsets of [n] in lexicographic order. Throws ResourceLimit when
// there are more than `cap`.
std::vector<Menu> all_menus(std::size_t n, std::size_t k, std::size_t cap = 100000);

std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace menurec
