#include "nfh/constraints.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nfh {

void validate_constraints(const ConstraintSet& constraints, Index ny, Index nx) {
  if (constraints.box) {
    const auto [lo, hi] = *constraints.box;
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("constraints: box bounds must be finite");
    if (lo > hi) throw std::invalid_argument("constraints: box is empty (lo > hi)");
    if (lo > 0.0 || hi < 0.0)
      throw std::invalid_argument("constraints: box must contain 0");
  }
  if (constraints.support) {
    const MaskImage& mask = *constraints.support;
    if (mask.rows() != ny || mask.cols() != nx)
      throw std::invalid_argument("constraints: support mask shape mismatch");
    if (((mask != 0) && (mask != 1)).any())
      throw std::invalid_argument("constraints: support mask must be 0/1 valued");
  }
}

RealImage project(const RealImage& phi, const ConstraintSet& constraints) {
  validate_constraints(constraints, phi.rows(), phi.cols());
  if (!constraints.any()) return phi;
  RealImage out = phi;
  if (constraints.support) out *= constraints.support->cast<double>();
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  if (constraints.box) {
    lo = constraints.box->first;
    hi = constraints.box->second;
  }
  if (constraints.negativity) hi = std::min(hi, 0.0);
  if (std::isfinite(lo)) out = out.max(lo);
  if (std::isfinite(hi)) out = out.min(hi);
  return out;
}

}  // namespace nfh
