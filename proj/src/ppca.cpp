#include "pmog/ppca.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <vector>

namespace pmog {

namespace {

struct Spectrum {
  Vector values;   // descending
  Matrix vectors;  // matching columns
};

// Descending eigendecomposition. Ties keep the solver's index order, and each
// eigenvector is signed so that its largest-magnitude entry is positive.
Spectrum descending_eigen(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  require(es.info() == Eigen::Success, ErrorCode::DegenerateSpectrum,
          "symmetric eigendecomposition failed");
  const Eigen::Index p = S.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return es.eigenvalues()(a) > es.eigenvalues()(b);
  });
  Spectrum out{Vector(p), Matrix(p, p)};
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.values(j) = es.eigenvalues()(src);
    Vector v = es.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    out.vectors.col(j) = v;
  }
  return out;
}

}  // namespace

Matrix PpcaFit::mixing_estimate() const {
  const Vector scale = (Lambda_q.array() - sigma2_hat).sqrt();
  return U_q * scale.asDiagonal();
}

Vector column_mean(const Matrix& X) { return X.rowwise().mean(); }

Matrix sample_covariance(const Matrix& X) {
  const Matrix centered = X.colwise() - column_mean(X);
  Matrix S = centered * centered.transpose() / static_cast<double>(X.cols());
  return 0.5 * (S + S.transpose());
}

PpcaFit ppca_fit(const Matrix& X, Eigen::Index q, NoiseModel noise) {
  const Eigen::Index p = X.rows();
  const Eigen::Index n = X.cols();
  require(q >= 1 && q <= p, ErrorCode::InvalidArgument, "need 1 <= q <= p");
  require(p <= n, ErrorCode::InvalidArgument, "need at least as many samples as dimensions");
  require(X.allFinite(), ErrorCode::InvalidArgument, "observations must be finite");

  PpcaFit fit;
  fit.mu_hat = column_mean(X);
  Spectrum spec = descending_eigen(sample_covariance(X));
  fit.eigenvalues = std::move(spec.values);
  fit.eigenvectors = std::move(spec.vectors);
  fit.U_q = fit.eigenvectors.leftCols(q);
  fit.Lambda_q = fit.eigenvalues.head(q);
  if (noise == NoiseModel::Estimate && q < p)
    fit.sigma2_hat = std::max(0.0, fit.eigenvalues.tail(p - q).mean());

  const double lambda_min = fit.Lambda_q(q - 1);
  if (!(lambda_min > fit.sigma2_hat + 1e-12)) {
    std::ostringstream os;
    os << "eigenvalue " << q << " (" << lambda_min << ") does not exceed the noise level "
       << fit.sigma2_hat;
    fail(ErrorCode::DegenerateSpectrum, os.str());
  }
  const Vector inv_scale = (fit.Lambda_q.array() - fit.sigma2_hat).rsqrt();
  fit.whitener = inv_scale.asDiagonal() * fit.U_q.transpose();
  return fit;
}

DataMatrix whiten(const Matrix& X, const PpcaFit& fit) {
  require(X.rows() == fit.observed_dims(), ErrorCode::InvalidArgument,
          "observation dimension does not match the fit");
  return DataMatrix(fit.whitener * (X.colwise() - fit.mu_hat));
}

Matrix empirical_whiten(const Matrix& S) {
  require(S.rows() >= 1 && S.cols() >= 1, ErrorCode::InvalidArgument, "empty source matrix");
  if (S.cols() < S.rows() + 1)
    fail(ErrorCode::SingularCovariance, "fewer samples than needed for a nonsingular covariance");
  const Spectrum spec = descending_eigen(sample_covariance(S));
  const double top = spec.values(0);
  const double bottom = spec.values(spec.values.size() - 1);
  if (!(bottom > 1e-12 * std::max(top, 1e-300))) {
    std::ostringstream os;
    os << "source covariance is singular (smallest eigenvalue " << bottom << ")";
    fail(ErrorCode::SingularCovariance, os.str());
  }
  const Vector inv_sqrt = spec.values.array().rsqrt();
  Matrix out = inv_sqrt.asDiagonal() * spec.vectors.transpose() * (S.colwise() - column_mean(S));
  out.colwise() -= column_mean(out);
  return out;
}

Matrix reconstruct_sources(const Matrix& X, const PpcaFit& fit, const Matrix& W) {
  require(W.cols() == fit.latent_dims(), ErrorCode::InvalidArgument,
          "unmixing rows must have the latent dimension");
  return W * whiten(X, fit).values();
}

}  // namespace pmog
