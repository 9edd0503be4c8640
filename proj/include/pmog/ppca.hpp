#pragma once

#include "pmog/types.hpp"

namespace pmog {

/// How the isotropic noise level enters the whitener.
///   Estimate: sigma2_hat is the mean of the discarded eigenvalues.
///   Ignore:   sigma2_hat = 0, giving exact unit-covariance whitening (the
///             setting FastICA expects).
enum class NoiseModel { Estimate, Ignore };

struct PpcaFit {
  Vector mu_hat;
  double sigma2_hat = 0.0;
  Matrix U_q;        // p x q, orthonormal columns
  Vector Lambda_q;   // descending
  Matrix whitener;   // q x p
  /// Full spectrum of the sample covariance, descending, with its eigenvectors.
  Vector eigenvalues;
  Matrix eigenvectors;

  Eigen::Index observed_dims() const noexcept { return mu_hat.size(); }
  Eigen::Index latent_dims() const noexcept { return Lambda_q.size(); }
  /// One ML mixing estimate, U_q (Lambda_q - sigma2 I)^{1/2}, i.e. Q = I.
  Matrix mixing_estimate() const;
};

/// Sample mean and 1/n sample covariance of the columns of X.
Vector column_mean(const Matrix& X);
Matrix sample_covariance(const Matrix& X);

PpcaFit ppca_fit(const Matrix& X, Eigen::Index q, NoiseModel noise = NoiseModel::Estimate);

DataMatrix whiten(const Matrix& X, const PpcaFit& fit);

/// Zero-mean, identity-covariance version of S via an eigendecomposition of
/// its sample covariance.
Matrix empirical_whiten(const Matrix& S);

/// S_hat = W z, with z the whitened observations and W's rows the projections.
Matrix reconstruct_sources(const Matrix& X, const PpcaFit& fit, const Matrix& W);

}  // namespace pmog
