#pragma once

#include "pmog/types.hpp"

namespace pmog {

/// Mean over rows of A of the best absolute correlation with any row of B.
double match_score(const Matrix& A, const Matrix& B);

/// Pearson correlation of two equal-length rows.
double correlation(const Vector& x, const Vector& y);

/// Rank-based inverse normal transform with plotting positions (r - 0.5)/m,
/// placed on the sample mean and standard deviation of x. Ties get averaged ranks.
Vector to_normality(const Vector& x);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;  // two-sided
};
WelchResult welch_t_test(const Vector& x, const Vector& y);

/// I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double dof);

struct MatchReport {
  Vector match_a;
  Vector match_b;
  Vector transformed_a;
  Vector transformed_b;
  double t_stat = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Per-group normality transform followed by the unequal-variance t-test.
MatchReport compare_match(const Vector& match_a, const Vector& match_b);

}  // namespace pmog
