#include "menurec/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "menurec/error.hpp"

namespace menurec {

ItemDistribution::ItemDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidInput("item distribution is empty");
  double sum = 0.0;
  for (double& p : probs_) {
    if (!std::isfinite(p)) throw InvalidInput("item distribution has non-finite entry");
    if (p < 0.0) {
      if (p < -kFloorSlack) throw InvalidInput("item distribution has negative entry");
      p = 0.0;
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw InvalidInput("item distribution sums to " + std::to_string(sum));
}

ItemDistribution ItemDistribution::uniform(std::size_t n) {
  return ItemDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ItemDistribution ItemDistribution::point_mass(std::size_t n, std::size_t item) {
  if (item >= n) throw InvalidInput("point mass item out of range");
  std::vector<double> p(n, 0.0);
  p[item] = 1.0;
  return ItemDistribution(std::move(p));
}

ItemDistribution ItemDistribution::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw InvalidInput("weights must have positive sum");
  for (double& w : weights) w /= sum;
  return ItemDistribution(std::move(weights));
}

Menu::Menu(std::vector<std::size_t> items, std::size_t n) : items_(std::move(items)) {
  if (items_.empty()) throw InvalidInput("menu is empty");
  std::sort(items_.begin(), items_.end());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i] >= n) throw InvalidInput("menu item out of range");
    if (i > 0 && items_[i] == items_[i - 1])
      throw InvalidInput("menu items are not distinct");
  }
}

bool Menu::contains(std::size_t item) const {
  return std::binary_search(items_.begin(), items_.end(), item);
}

std::string Menu::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(items_[i]);
  }
  return out;
}

MenuDistribution::MenuDistribution(std::vector<MenuMass> support)
    : support_(std::move(support)) {
  if (support_.empty()) throw InvalidInput("menu distribution is empty");
  double sum = 0.0;
  for (const auto& m : support_) {
    if (!(m.prob > 0.0)) throw InvalidInput("menu distribution mass must be positive");
    sum += m.prob;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw InvalidInput("menu distribution sums to " + std::to_string(sum));
  std::vector<const Menu*> sorted;
  for (const auto& m : support_) sorted.push_back(&m.menu);
  std::sort(sorted.begin(), sorted.end(),
            [](const Menu* a, const Menu* b) { return *a < *b; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (*sorted[i] == *sorted[i - 1]) throw InvalidInput("duplicate menu in distribution");
  cumulative_.reserve(support_.size());
  double acc = 0.0;
  for (const auto& m : support_) {
    acc += m.prob;
    cumulative_.push_back(acc);
  }
}

MenuDistribution MenuDistribution::point_mass(Menu menu) {
  return MenuDistribution({MenuMass{std::move(menu), 1.0}});
}

const Menu& MenuDistribution::sample(double u) const {
  const double target = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;
  return support_[static_cast<std::size_t>(it - cumulative_.begin())].menu;
}

SmoothedSimplex::SmoothedSimplex(double phi_, std::size_t n_) : phi(phi_), n(n_) {
  if (!(phi > 0.0 && phi < 1.0)) throw InvalidInput("phi must lie in (0,1)");
  if (n < 2) throw InvalidInput("smoothed simplex needs n >= 2");
}

std::vector<double> SmoothedSimplex::vertex(std::size_t i) const {
  std::vector<double> b(n, floor());
  b.at(i) = 1.0 - phi;
  return b;
}

bool smoothed_simplex_contains(const ItemDistribution& x, const SmoothedSimplex& params) {
  require_dimension(x.probs(), params.n, "smoothed_simplex_contains");
  // The hull is the affine image s*y + floor*1 of the simplex, s = 1 - phi*n/(n-1).
  // For s > 0 membership is the coordinate floor test.
  const double n = static_cast<double>(params.n);
  const double floor = params.floor();
  const double scale = 1.0 - params.phi * n / (n - 1.0);
  if (std::abs(scale) <= 1e-15) {
    for (double xi : x.probs())
      if (std::abs(xi - floor) > kFloorSlack) return false;
    return true;
  }
  for (double xi : x.probs()) {
    const double y = (xi - floor) / scale;
    if (y < -kFloorSlack / std::abs(scale)) return false;
  }
  return true;
}

void require_dimension(std::span<const double> x, std::size_t n, const char* what) {
  if (x.size() != n)
    throw InvalidInput(std::string(what) + ": dimension " + std::to_string(x.size()) +
                       " does not match " + std::to_string(n));
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  require_dimension(q, p.size(), "tv_distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

double l2_distance(std::span<const double> p, std::span<const double> q) {
  require_dimension(q, p.size(), "l2_distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += (p[i] - q[i]) * (p[i] - q[i]);
  return std::sqrt(acc);
}

double linf_distance(std::span<const double> p, std::span<const double> q) {
  require_dimension(q, p.size(), "linf_distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc = std::max(acc, std::abs(p[i] - q[i]));
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_dimension(b, a.size(), "dot");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace menurec
