#pragma once

// Per-sample kernels of the EM inner loop. Two implementations share one
// interface: `serial` is the plain reference used by tests, `parallel` is the
// OpenMP version used by the estimator.
//
// The parallel reductions split the samples into fixed-size chunks, reduce each
// chunk serially, and combine partials in chunk order. Results therefore depend
// only on n, never on the thread count, and stay bit-reproducible.

#include "pmog/mog.hpp"
#include "pmog/quadratic_form.hpp"

namespace pmog::kernels {

inline constexpr Eigen::Index kChunk = 512;

struct LikelihoodResult {
  double log_likelihood = 0.0;
  /// First sample whose log density is not finite, or -1.
  Eigen::Index bad_sample = -1;
};

struct ComponentSums {
  Vector weight;  // sum_i alpha_ki
  Vector first;   // sum_i alpha_ki u_i
};

namespace serial {

void project(const Matrix& Z, const Vector& w, Vector& u);
LikelihoodResult log_likelihood(const Vector& u, const MogParams& params);
/// Fills alpha (R x n) and returns the total log likelihood.
LikelihoodResult responsibilities(const Vector& u, const MogParams& params, Matrix& alpha);
ComponentSums component_sums(const Matrix& alpha, const Vector& u);
Vector weighted_square_deviation(const Matrix& alpha, const Vector& u, const Vector& mu);
QuadraticForm quadratic_form(const Matrix& alpha, const Matrix& Z, const Vector& mu,
                             const Vector& sigma2);
/// sum_i sum_k alpha_ki [log pi_k + log N(u_i | mu_k, sigma2_k) - log alpha_ki]
double expected_log_term(const Matrix& alpha, const Vector& u, const MogParams& params);

}  // namespace serial

namespace parallel {

void project(const Matrix& Z, const Vector& w, Vector& u);
LikelihoodResult log_likelihood(const Vector& u, const MogParams& params);
LikelihoodResult responsibilities(const Vector& u, const MogParams& params, Matrix& alpha);
ComponentSums component_sums(const Matrix& alpha, const Vector& u);
Vector weighted_square_deviation(const Matrix& alpha, const Vector& u, const Vector& mu);
QuadraticForm quadratic_form(const Matrix& alpha, const Matrix& Z, const Vector& mu,
                             const Vector& sigma2);
double expected_log_term(const Matrix& alpha, const Vector& u, const MogParams& params);

}  // namespace parallel

}  // namespace pmog::kernels
