#pragma once

#include <vector>

#include "pmog/types.hpp"

namespace pmog {

enum class FicaMode { Deflation, Symmetric };

struct FicaConfig {
  double tol = 1e-6;
  int max_iters = 1000;
  /// A recovered source whose log-cosh contrast is within this many null
  /// standard errors of the Gaussian value is reported as Gaussian-like.
  double gaussian_z = 4.0;
  /// Throw NotConverged instead of returning flags when an iteration budget runs out.
  bool strict = false;
};

struct FicaResult {
  Matrix W;  // q x dims, orthonormal rows
  std::vector<bool> converged;
  std::vector<int> iterations;
  /// Standardised distance of mean log cosh(w^T z) from its Gaussian value.
  std::vector<double> contrast_z;
  /// True when every recovered direction is indistinguishable from Gaussian.
  bool gaussian_like = false;

  bool all_converged() const;
};

/// Fixed-point FastICA with the tanh nonlinearity on whitened data.
FicaResult fica_extract(const DataMatrix& Z, Eigen::Index q, FicaMode mode, Rng& rng,
                        const FicaConfig& config = {});

/// (W W^T)^{-1/2} W.
Matrix symmetric_orthogonalize(const Matrix& W);

}  // namespace pmog
