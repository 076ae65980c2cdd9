#pragma once

#include <optional>
#include <utility>

#include "nfh/types.hpp"

namespace nfh {

// Pointwise-separable convex constraints on the phase. The admissible set is
// the intersection of the selected pieces; the box must contain 0 so the set
// stays nonempty under any combination (and the masked-out region, which is
// pinned to 0, stays feasible).
struct ConstraintSet {
  bool negativity = false;                        // phi <= 0
  std::optional<MaskImage> support;               // phi == 0 outside the mask
  std::optional<std::pair<double, double>> box;   // lo <= phi <= hi, lo <= 0 <= hi

  bool any() const { return negativity || support.has_value() || box.has_value(); }
};

// Throws std::invalid_argument for infeasible or ill-shaped combinations.
void validate_constraints(const ConstraintSet& constraints, Index ny, Index nx);

// Exact Euclidean projection onto the constraint set: zero outside the
// support, then clamp to the (negativity-tightened) box. Idempotent and
// non-expansive; identity for an empty set.
RealImage project(const RealImage& phi, const ConstraintSet& constraints);

}  // namespace nfh
