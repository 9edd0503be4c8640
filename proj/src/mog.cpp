#include "pmog/mog.hpp"

#include <cmath>
#include <sstream>

#include "pmog/kernels.hpp"

namespace pmog {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  require(values_.rows() > 0 && values_.cols() > 0, ErrorCode::InvalidArgument,
          "data matrix must be non-empty");
  require(values_.allFinite(), ErrorCode::InvalidArgument, "data matrix has non-finite entries");
}

MogParams::MogParams(Vector pi, Vector mu, Vector sigma2)
    : pi_(std::move(pi)), mu_(std::move(mu)), sigma2_(std::move(sigma2)) {
  const auto R = pi_.size();
  require(R > 0 && mu_.size() == R && sigma2_.size() == R, ErrorCode::InvalidArgument,
          "mixture parameter vectors must share a positive length");
  require(pi_.allFinite() && mu_.allFinite() && sigma2_.allFinite(), ErrorCode::InvalidArgument,
          "mixture parameters must be finite");
  require((pi_.array() >= 0.0).all() && (pi_.array() <= 1.0).all(), ErrorCode::InvalidArgument,
          "mixing fractions must lie in [0, 1]");
  require(std::abs(pi_.sum() - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "mixing fractions must sum to one");
  require((sigma2_.array() > 0.0).all(), ErrorCode::InvalidArgument,
          "component variances must be positive");
}

PriorConfig PriorConfig::defaults(Eigen::Index components, double projection_variance) {
  require(projection_variance > 0.0 && std::isfinite(projection_variance),
          ErrorCode::InvalidArgument, "projection variance must be positive");
  return {Vector::Constant(components, 2.0), Vector::Constant(components, 1.0),
          Vector::Constant(components, 100.0 / projection_variance)};
}

PriorConfig PriorConfig::neutral(Eigen::Index components) {
  return {Vector::Constant(components, 1.0), Vector::Constant(components, -1.0),
          Vector::Constant(components, std::numeric_limits<double>::infinity())};
}

void PriorConfig::validate(Eigen::Index components) const {
  require(beta.size() == components && theta.size() == components && gamma.size() == components,
          ErrorCode::InvalidArgument, "prior vectors must have one entry per component");
  require((beta.array() >= 1.0).all(), ErrorCode::InvalidArgument, "Dirichlet beta must be >= 1");
  require((gamma.array() > 0.0).all(), ErrorCode::InvalidArgument, "gamma must be positive");
}

ConstraintSet::ConstraintSet(Eigen::Index dims)
    : G_(dims, 0), P_(Matrix::Identity(dims, dims)) {
  require(dims > 0, ErrorCode::InvalidArgument, "constraint dimension must be positive");
}

ConstraintSet::ConstraintSet(Matrix G) : G_(std::move(G)) {
  const auto q = G_.rows();
  const auto L = G_.cols();
  require(q > 0, ErrorCode::InvalidArgument, "constraint dimension must be positive");
  require(L < q, ErrorCode::InvalidArgument, "need fewer constraints than dimensions");
  P_ = Matrix::Identity(q, q);
  if (L == 0) return;
  Eigen::ColPivHouseholderQR<Matrix> qr(G_);
  require(qr.rank() == L, ErrorCode::InvalidArgument, "constraint matrix must have full column rank");
  // P_G = I - G (G^T G)^{-1} G^T computed through an orthonormal basis of span(G).
  const Matrix basis = qr.householderQ() * Matrix::Identity(q, L);
  P_ -= basis * basis.transpose();
  P_ = 0.5 * (P_ + P_.transpose()).eval();
}

double mog_log_pdf(double u, const MogParams& params) {
  Vector one(1);
  one(0) = u;
  return kernels::serial::log_likelihood(one, params).log_likelihood;
}

double mog_pdf(double u, const MogParams& params) { return std::exp(mog_log_pdf(u, params)); }

double log_likelihood_h1(const DataMatrix& Z, const Vector& w, const MogParams& params) {
  require(w.size() == Z.dims() && w.allFinite(), ErrorCode::InvalidArgument,
          "projection vector must be finite with one entry per dimension");
  Vector u;
  kernels::parallel::project(Z.values(), w, u);
  const auto r = kernels::parallel::log_likelihood(u, params);
  if (r.bad_sample >= 0) {
    std::ostringstream os;
    os << "mixture density underflows at sample " << r.bad_sample;
    fail(ErrorCode::NumericalUnderflow, os.str());
  }
  return r.log_likelihood;
}

double log_prior_h2(const MogParams& params, const PriorConfig& priors) {
  priors.validate(params.components());
  double h = 0.0;
  for (Eigen::Index k = 0; k < params.components(); ++k) {
    // Guard the 0 * log 0 and inf-gamma limits so neutral priors give exactly 0.
    if (priors.beta(k) != 1.0) h += (priors.beta(k) - 1.0) * std::log(params.pi()(k));
    if (priors.theta(k) != -1.0) h -= (priors.theta(k) + 1.0) * std::log(params.sigma2()(k));
    if (std::isfinite(priors.gamma(k))) h -= 1.0 / (priors.gamma(k) * params.sigma2()(k));
  }
  return h;
}

double objective_h(const DataMatrix& Z, const Vector& w, const MogParams& params,
                   const PriorConfig& priors) {
  return log_likelihood_h1(Z, w, params) + log_prior_h2(params, priors);
}

Responsibilities e_step(const DataMatrix& Z, const Vector& w, const MogParams& params) {
  require(w.size() == Z.dims(), ErrorCode::InvalidArgument, "projection has wrong length");
  Vector u;
  kernels::parallel::project(Z.values(), w, u);
  Responsibilities resp;
  const auto r = kernels::parallel::responsibilities(u, params, resp.alpha);
  if (r.bad_sample >= 0) {
    std::ostringstream os;
    os << "all component densities underflow at sample " << r.bad_sample;
    fail(ErrorCode::DegenerateSample, os.str());
  }
  return resp;
}

double expected_log_likelihood_q(const DataMatrix& Z, const Vector& w, const MogParams& params,
                                 const Responsibilities& resp) {
  Vector u;
  kernels::parallel::project(Z.values(), w, u);
  return kernels::parallel::expected_log_term(resp.alpha, u, params);
}

}  // namespace pmog
