#pragma once

#include "slsfem/errors.hpp"

namespace slsfem {

/// Uniform dyadic partition of (0,1) with homogeneous Dirichlet ends.
/// Mesh width h = 2^(-level); the interior nodes x_k = k*h,
/// k = 1..n_interior, carry one piecewise-linear hat function each.
struct Mesh1D {
  int level = 0;
  double h = 0.0;
  int n_interior = 0;

  static Mesh1D uniform(int level) {
    if (level < 1 || level > 30)
      throw ValidationError("Mesh1D: level must be in [1,30], got " +
                            std::to_string(level));
    Mesh1D m;
    m.level = level;
    m.n_interior = (1 << level) - 1;
    m.h = 1.0 / static_cast<double>(m.n_interior + 1);
    return m;
  }

  /// Interior node x_{k+1} for 0-based index k in [0, n_interior).
  double node(int k) const { return static_cast<double>(k + 1) * h; }
};

}  // namespace slsfem
