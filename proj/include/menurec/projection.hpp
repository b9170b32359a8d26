#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace menurec {

struct Halfspace {
  std::vector<double> normal;  // normal . x <= offset
  double offset = 0.0;
};

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

// Convex subset of the simplex: simplex ∩ {x >= floors} ∩ ball ∩ halfspaces.
class SetDescriptor {
 public:
  SetDescriptor() = default;
  explicit SetDescriptor(std::size_t n);

  static SetDescriptor simplex(std::size_t n);
  // Floors phi/(n-1) on every coordinate.
  static SetDescriptor smoothed_simplex(double phi, std::size_t n);

  SetDescriptor& with_floors(std::vector<double> floors);
  SetDescriptor& with_uniform_floor(double floor);
  SetDescriptor& with_ball(std::vector<double> center, double radius);
  SetDescriptor& add_halfspace(std::vector<double> normal, double offset);

  std::size_t dimension() const { return n_; }
  const std::vector<double>& floors() const { return floors_; }
  const std::optional<Ball>& ball() const { return ball_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

  // Largest constraint violation at x (0 when inside).
  double max_violation(std::span<const double> x) const;
  bool contains(std::span<const double> x, double tol = 1e-9) const;

  // The image {(1-xi) y + xi c : y in set}, written in closed form.
  SetDescriptor shrunk_toward(std::span<const double> center, double xi) const;

  // Structural containment: every constraint of `outer` is implied by a
  // constraint of this set of the same kind.
  bool is_structurally_inside(const SetDescriptor& outer) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> floors_;
  std::optional<Ball> ball_;
  std::vector<Halfspace> halfspaces_;
};

struct ProjectionOptions {
  double feasibility_tolerance = 1e-6;
};

// Euclidean projection. Polyhedral sets are solved exactly as a
// least-distance program (NNLS dual); a ball constraint is handled by a
// one-dimensional search on its multiplier. Throws InfeasibleSet when the
// set is empty.
std::vector<double> project_to_set(std::span<const double> x, const SetDescriptor& set,
                                   const ProjectionOptions& options = {});

// Exact projection onto {x : sum x = 1, x >= floors}.
std::vector<double> project_to_floored_simplex(std::span<const double> x,
                                               std::span<const double> floors);

// Chebyshev ball of the set inside its affine hull (sum x = 1). Not defined
// for sets with a ball constraint.
struct InscribedBall {
  std::vector<double> center;
  double radius = 0.0;
};
InscribedBall inscribed_ball(const SetDescriptor& set);

}  // namespace menurec
