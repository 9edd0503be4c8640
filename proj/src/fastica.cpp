#include "pmog/fastica.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "pmog/entropy.hpp"

namespace pmog {

namespace {

Vector random_unit(Eigen::Index dims, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Vector v(dims);
    for (Eigen::Index d = 0; d < dims; ++d) v(d) = normal(rng);
    const double norm = v.norm();
    if (norm > 1e-8) return v / norm;
  }
}

void orthogonalize_against(Vector& w, const Matrix& W, Eigen::Index rows) {
  for (Eigen::Index j = 0; j < rows; ++j) w -= W.row(j).dot(w) * W.row(j).transpose();
}

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Null mean and standard deviation of log cosh(v), v ~ N(0, 1).
std::pair<double, double> log_cosh_null() {
  const GaussHermite& rule = gauss_hermite(64);
  const double m = gaussian_expectation(log_cosh, 1.0, rule);
  const double m2 = gaussian_expectation([](double x) { return log_cosh(x) * log_cosh(x); }, 1.0, rule);
  return {m, std::sqrt(m2 - m * m)};
}

void not_converged(Eigen::Index source) {
  std::ostringstream os;
  os << "FastICA did not converge for source " << source;
  fail(ErrorCode::NotConverged, os.str());
}

}  // namespace

bool FicaResult::all_converged() const {
  for (bool c : converged)
    if (!c) return false;
  return true;
}

Matrix symmetric_orthogonalize(const Matrix& W) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(W * W.transpose());
  require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0,
          ErrorCode::InvalidArgument, "rows are linearly dependent");
  const Matrix inv_sqrt = es.eigenvectors() * es.eigenvalues().array().rsqrt().matrix().asDiagonal() *
                          es.eigenvectors().transpose();
  return inv_sqrt * W;
}

FicaResult fica_extract(const DataMatrix& Z, Eigen::Index q, FicaMode mode, Rng& rng,
                        const FicaConfig& config) {
  const Eigen::Index d = Z.dims();
  const double n = static_cast<double>(Z.samples());
  require(q >= 1 && q <= d, ErrorCode::InvalidArgument, "need 1 <= q <= dims");
  require(config.tol > 0 && config.max_iters > 0, ErrorCode::InvalidArgument,
          "FastICA tolerance and budget must be positive");
  const Matrix& X = Z.values();

  FicaResult out;
  out.W = Matrix::Zero(q, d);
  out.converged.assign(static_cast<std::size_t>(q), false);
  out.iterations.assign(static_cast<std::size_t>(q), 0);

  if (mode == FicaMode::Deflation) {
    for (Eigen::Index p = 0; p < q; ++p) {
      Vector w = random_unit(d, rng);
      orthogonalize_against(w, out.W, p);
      w.normalize();
      int it = 0;
      bool done = false;
      while (it < config.max_iters && !done) {
        ++it;
        const Eigen::ArrayXd g = (X.transpose() * w).array().tanh();
        Vector w_new = X * g.matrix() / n - (1.0 - g.square()).mean() * w;
        orthogonalize_against(w_new, out.W, p);
        w_new.normalize();
        done = std::abs(1.0 - std::abs(w_new.dot(w))) < config.tol;
        w = std::move(w_new);
      }
      out.W.row(p) = w.transpose();
      out.converged[static_cast<std::size_t>(p)] = done;
      out.iterations[static_cast<std::size_t>(p)] = it;
      if (!done && config.strict) not_converged(p);
    }
  } else {
    Matrix W(q, d);
    for (Eigen::Index p = 0; p < q; ++p) W.row(p) = random_unit(d, rng).transpose();
    W = symmetric_orthogonalize(W);
    int it = 0;
    bool done = false;
    while (it < config.max_iters && !done) {
      ++it;
      const Eigen::ArrayXXd G = (W * X).array().tanh();
      const Vector dg = (1.0 - G.square()).rowwise().mean();
      Matrix W_new = G.matrix() * X.transpose() / n - dg.asDiagonal() * W;
      W_new = symmetric_orthogonalize(W_new);
      const Vector agreement = (W_new * W.transpose()).diagonal().cwiseAbs();
      done = (1.0 - agreement.array()).abs().maxCoeff() < config.tol;
      W = std::move(W_new);
    }
    out.W = W;
    out.converged.assign(static_cast<std::size_t>(q), done);
    out.iterations.assign(static_cast<std::size_t>(q), it);
    if (!done && config.strict) not_converged(0);
  }

  const auto [null_mean, null_sd] = log_cosh_null();
  const Matrix Y = out.W * X;
  out.gaussian_like = true;
  for (Eigen::Index p = 0; p < q; ++p) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < Y.cols(); ++i) acc += log_cosh(Y(p, i));
    const double z = (acc / n - null_mean) / (null_sd / std::sqrt(n));
    out.contrast_z.push_back(z);
    if (std::abs(z) >= config.gaussian_z) out.gaussian_like = false;
  }
  return out;
}

}  // namespace pmog
