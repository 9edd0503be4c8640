#pragma once

#include <functional>

#include "pmog/mog.hpp"

namespace pmog {

/// Gauss-Hermite rule for the weight exp(-t^2), computed by Golub-Welsch.
struct GaussHermite {
  Vector nodes;
  Vector weights;
};
const GaussHermite& gauss_hermite(int order);

/// E[f(v)] for v ~ N(0, sigma2) using the given rule.
double gaussian_expectation(const std::function<double(double)>& f, double sigma2,
                            const GaussHermite& rule);

/// Sample-average entropy estimate -mean_i log p(u_i) under the fitted mixture.
double pmog_entropy(const Vector& u, const MogParams& params);

/// Normalisation constants of a one-function maximum-entropy approximation:
/// G = (Gbar + alpha1 x + alpha2 x^2 + gamma) / delta is orthogonal to 1, x, x^2
/// and has unit second moment under N(0, sigma2).
struct MaxEntConstants {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double gamma = 0.0;
  double delta = 1.0;
  double gaussian_mean = 0.0;  // E[Gbar(v)]
};
MaxEntConstants maxent_constants(const std::function<double(double)>& gbar, double sigma2,
                                 int quadrature_order = 64);

/// Near-Gaussian entropy approximation with Gbar = tanh, evaluated on demeaned
/// samples u of variance sigma2.
double hyvarinen_entropy(const Vector& u, double sigma2);

/// -1/2 log det of the row correlation matrix of S (q x n). Zero iff the rows
/// are exactly uncorrelated.
double correlation_penalty(const Matrix& S);
/// Same penalty for a given correlation matrix.
double correlation_matrix_penalty(const Matrix& C);

}  // namespace pmog
