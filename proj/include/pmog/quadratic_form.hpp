#pragma once

#include "pmog/types.hpp"

namespace pmog {

/// The w-independent pieces of the M-step objective for the projection:
/// Q(w) = b^T w - w^T A w / 2 + const.
struct QuadraticForm {
  Vector b;
  Matrix A;

  QuadraticForm scaled(double factor) const { return {b * factor, A * factor}; }
};

}  // namespace pmog
