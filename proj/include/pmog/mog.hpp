#pragma once

#include <limits>

#include "pmog/types.hpp"

namespace pmog {

/// One-dimensional mixture of R Gaussians. Construction validates the simplex
/// and positivity invariants, so every live instance is usable as a density.
class MogParams {
 public:
  MogParams(Vector pi, Vector mu, Vector sigma2);

  const Vector& pi() const noexcept { return pi_; }
  const Vector& mu() const noexcept { return mu_; }
  const Vector& sigma2() const noexcept { return sigma2_; }
  Eigen::Index components() const noexcept { return pi_.size(); }

  friend bool operator==(const MogParams&, const MogParams&) = default;

 private:
  Vector pi_;
  Vector mu_;
  Vector sigma2_;
};

/// Dirichlet(beta) prior on pi and inverse-Gamma(theta, gamma) priors on the
/// variances. gamma may be +infinity, which removes the collapse penalty.
struct PriorConfig {
  Vector beta;
  Vector theta;
  Vector gamma;

  /// beta = 2, theta = 1, gamma = 100 / var(u0).
  static PriorConfig defaults(Eigen::Index components, double projection_variance);
  /// beta = 1, theta = -1, gamma = inf: H_2 vanishes identically.
  static PriorConfig neutral(Eigen::Index components);

  void validate(Eigen::Index components) const;
};

/// R x n posterior memberships; columns sum to one.
struct Responsibilities {
  Matrix alpha;

  Eigen::Index components() const noexcept { return alpha.rows(); }
  Eigen::Index samples() const noexcept { return alpha.cols(); }
};

/// Linear constraints G^T w = 0 and the cached orthogonal projector onto the
/// complement of span(G). L = 0 gives P_G = I.
class ConstraintSet {
 public:
  explicit ConstraintSet(Eigen::Index dims);
  ConstraintSet(Matrix G);

  const Matrix& G() const noexcept { return G_; }
  const Matrix& projector() const noexcept { return P_; }
  Eigen::Index dims() const noexcept { return P_.rows(); }
  Eigen::Index count() const noexcept { return G_.cols(); }

 private:
  Matrix G_;
  Matrix P_;
};

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double mog_pdf(double u, const MogParams& params);
double mog_log_pdf(double u, const MogParams& params);

/// Sum of log mixture densities of the projections w^T z_i.
double log_likelihood_h1(const DataMatrix& Z, const Vector& w, const MogParams& params);
double log_prior_h2(const MogParams& params, const PriorConfig& priors);
double objective_h(const DataMatrix& Z, const Vector& w, const MogParams& params,
                   const PriorConfig& priors);

Responsibilities e_step(const DataMatrix& Z, const Vector& w, const MogParams& params);

/// Expected complete-data term Q(params, w; alpha), the EM lower bound on H_1.
double expected_log_likelihood_q(const DataMatrix& Z, const Vector& w, const MogParams& params,
                                 const Responsibilities& resp);

}  // namespace pmog
