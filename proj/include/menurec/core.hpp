#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace menurec {

inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kFloorSlack = 1e-12;

// A probability distribution over n items. Entries in [-1e-12, 0) are snapped
// to zero on construction; anything more negative is rejected.
class ItemDistribution {
 public:
  ItemDistribution() = default;
  explicit ItemDistribution(std::vector<double> probs);

  static ItemDistribution uniform(std::size_t n);
  static ItemDistribution point_mass(std::size_t n, std::size_t item);
  // Normalizes a non-negative vector with positive sum.
  static ItemDistribution normalized(std::vector<double> weights);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vec() const { return probs_; }

  friend bool operator==(const ItemDistribution&, const ItemDistribution&) = default;

 private:
  std::vector<double> probs_;
};

// k distinct items, stored sorted so that equal menus compare and hash equal.
class Menu {
 public:
  Menu() = default;
  Menu(std::vector<std::size_t> items, std::size_t n);

  std::size_t size() const { return items_.size(); }
  std::span<const std::size_t> items() const { return items_; }
  std::size_t operator[](std::size_t i) const { return items_[i]; }
  bool contains(std::size_t item) const;
  std::string to_string() const;  // "0,2,3"

  friend auto operator<=>(const Menu&, const Menu&) = default;

 private:
  std::vector<std::size_t> items_;
};

struct MenuMass {
  Menu menu;
  double prob = 0.0;
};

// Sparse distribution over menus; menus are distinct and masses positive.
class MenuDistribution {
 public:
  MenuDistribution() = default;
  explicit MenuDistribution(std::vector<MenuMass> support);

  static MenuDistribution point_mass(Menu menu);

  std::span<const MenuMass> support() const { return support_; }
  std::size_t size() const { return support_.size(); }

  // Inverse-CDF lookup for u in [0,1).
  const Menu& sample(double u) const;

 private:
  std::vector<MenuMass> support_;
  std::vector<double> cumulative_;
};

// Convex hull of the n smoothed basis vectors b^i (1-phi at i, phi/(n-1)
// elsewhere).
struct SmoothedSimplex {
  double phi = 0.0;
  std::size_t n = 0;

  SmoothedSimplex(double phi, std::size_t n);

  double floor() const { return phi / static_cast<double>(n - 1); }
  std::vector<double> vertex(std::size_t i) const;
};

bool smoothed_simplex_contains(const ItemDistribution& x,
                               const SmoothedSimplex& params);

double tv_distance(std::span<const double> p, std::span<const double> q);
double l2_distance(std::span<const double> p, std::span<const double> q);
double linf_distance(std::span<const double> p, std::span<const double> q);
double dot(std::span<const double> a, std::span<const double> b);

// Throws InvalidInput unless |x| == n.
void require_dimension(std::span<const double> x, std::size_t n,
                       const char* what);

}  // namespace menurec
