#include "pmog/entropy.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "pmog/kernels.hpp"

namespace pmog {

namespace {

GaussHermite golub_welsch(int order) {
  Matrix J = Matrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(0.5 * k);
    J(k, k - 1) = off;
    J(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(J);
  GaussHermite rule{es.eigenvalues(), Vector(order)};
  const double mass = std::sqrt(std::numbers::pi);
  for (int k = 0; k < order; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    rule.weights(k) = mass * v0 * v0;
  }
  return rule;
}

}  // namespace

const GaussHermite& gauss_hermite(int order) {
  require(order >= 1, ErrorCode::InvalidArgument, "quadrature order must be positive");
  static std::mutex mutex;
  static std::map<int, GaussHermite> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, golub_welsch(order)).first;
  return it->second;
}

double gaussian_expectation(const std::function<double(double)>& f, double sigma2,
                            const GaussHermite& rule) {
  const double scale = std::sqrt(2.0 * sigma2);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k)
    acc += rule.weights(k) * f(scale * rule.nodes(k));
  return acc / std::sqrt(std::numbers::pi);
}

double pmog_entropy(const Vector& u, const MogParams& params) {
  require(u.size() > 0, ErrorCode::InvalidArgument, "no samples");
  const auto ll = kernels::parallel::log_likelihood(u, params);
  if (ll.bad_sample >= 0) {
    std::ostringstream os;
    os << "mixture density underflows at sample " << ll.bad_sample;
    fail(ErrorCode::NumericalUnderflow, os.str());
  }
  return -ll.log_likelihood / static_cast<double>(u.size());
}

MaxEntConstants maxent_constants(const std::function<double(double)>& gbar, double sigma2,
                                 int quadrature_order) {
  require(sigma2 > 0 && std::isfinite(sigma2), ErrorCode::InvalidArgument,
          "variance must be positive");
  const GaussHermite& rule = gauss_hermite(quadrature_order);
  auto E = [&](const std::function<double(double)>& f) {
    return gaussian_expectation(f, sigma2, rule);
  };
  const double m0 = E(gbar);
  const double m1 = E([&](double x) { return x * gbar(x); });
  const double m2 = E([&](double x) { return x * x * gbar(x); });

  // Orthogonality to 1, x, x^2 under N(0, s2), unknowns (alpha1, alpha2, gamma):
  //   k=0:  alpha2 s2 + gamma           = -m0
  //   k=1:  alpha1 s2                   = -m1
  //   k=2:  3 alpha2 s2^2 + gamma s2    = -m2
  MaxEntConstants c;
  c.gaussian_mean = m0;
  c.alpha1 = -m1 / sigma2;
  c.alpha2 = (m0 * sigma2 - m2) / (2.0 * sigma2 * sigma2);
  c.gamma = -m0 - c.alpha2 * sigma2;
  const double second = E([&](double x) {
    const double g = gbar(x) + c.alpha1 * x + c.alpha2 * x * x + c.gamma;
    return g * g;
  });
  require(second > 0, ErrorCode::InvalidArgument,
          "contrast function is a quadratic polynomial; no normalisation exists");
  c.delta = std::sqrt(second);
  return c;
}

double hyvarinen_entropy(const Vector& u, double sigma2) {
  require(u.size() > 0, ErrorCode::InvalidArgument, "no samples");
  const auto gbar = [](double x) { return std::tanh(x); };
  const MaxEntConstants c = maxent_constants(gbar, sigma2);
  const double sample_mean = u.array().tanh().mean();
  const double gap = sample_mean - c.gaussian_mean;
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e) + 0.5 * std::log(sigma2) -
         gap * gap / (2.0 * c.delta * c.delta);
}

double correlation_penalty(const Matrix& S) {
  require(S.rows() >= 1 && S.cols() >= 2, ErrorCode::InvalidArgument,
          "need at least one row and two samples");
  Matrix centered = S.colwise() - S.rowwise().mean();
  for (Eigen::Index r = 0; r < centered.rows(); ++r) {
    const double norm = centered.row(r).norm();
    if (!(norm > 0.0)) {
      std::ostringstream os;
      os << "row " << r << " is constant";
      fail(ErrorCode::ConstantRow, os.str());
    }
    centered.row(r) /= norm;
  }
  Matrix C = centered * centered.transpose();
  C.diagonal().setOnes();
  return correlation_matrix_penalty(C);
}

double correlation_matrix_penalty(const Matrix& C) {
  require(C.rows() == C.cols() && C.rows() >= 1, ErrorCode::InvalidArgument,
          "correlation matrix must be square");
  Eigen::LLT<Matrix> llt(C);
  double log_det = -std::numeric_limits<double>::infinity();
  if (llt.info() == Eigen::Success) log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  if (!(log_det > std::log(1e-300)))
    fail(ErrorCode::SingularCorrelation, "correlation matrix is singular");
  // log det <= 0 for any correlation matrix; clip rounding noise at the bound.
  return std::max(0.0, -0.5 * log_det);
}

}  // namespace pmog
