#include <cmath>
#include <limits>
#include <vector>

#include "pmog/kernels.hpp"

namespace pmog::kernels::serial {

void project(const Matrix& Z, const Vector& w, Vector& u) {
  const Eigen::Index q = Z.rows();
  const Eigen::Index n = Z.cols();
  u.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index d = 0; d < q; ++d) s += Z(d, i) * w(d);
    u(i) = s;
  }
}

LikelihoodResult log_likelihood(const Vector& u, const MogParams& params) {
  const Eigen::Index R = params.components();
  LikelihoodResult out;
  std::vector<double> terms(static_cast<std::size_t>(R));
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < R; ++k) {
      const double d = u(i) - params.mu()(k);
      const double t = std::log(params.pi()(k)) - kLogSqrt2Pi - 0.5 * std::log(params.sigma2()(k)) -
                       0.5 * d * d / params.sigma2()(k);
      terms[static_cast<std::size_t>(k)] = t;
      if (t > top) top = t;
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - top);
    const double ld = top + std::log(acc);
    if (!std::isfinite(ld) && out.bad_sample < 0) out.bad_sample = i;
    out.log_likelihood += ld;
  }
  return out;
}

LikelihoodResult responsibilities(const Vector& u, const MogParams& params, Matrix& alpha) {
  const Eigen::Index R = params.components();
  const Eigen::Index n = u.size();
  alpha.resize(R, n);
  LikelihoodResult out;
  for (Eigen::Index i = 0; i < n; ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < R; ++k) {
      const double d = u(i) - params.mu()(k);
      alpha(k, i) = std::log(params.pi()(k)) - kLogSqrt2Pi - 0.5 * std::log(params.sigma2()(k)) -
                    0.5 * d * d / params.sigma2()(k);
      if (alpha(k, i) > top) top = alpha(k, i);
    }
    double acc = 0.0;
    for (Eigen::Index k = 0; k < R; ++k) {
      alpha(k, i) = std::exp(alpha(k, i) - top);
      acc += alpha(k, i);
    }
    for (Eigen::Index k = 0; k < R; ++k) alpha(k, i) /= acc;
    const double ld = top + std::log(acc);
    if (!std::isfinite(ld) && out.bad_sample < 0) out.bad_sample = i;
    out.log_likelihood += ld;
  }
  return out;
}

ComponentSums component_sums(const Matrix& alpha, const Vector& u) {
  const Eigen::Index R = alpha.rows();
  ComponentSums s{Vector::Zero(R), Vector::Zero(R)};
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    for (Eigen::Index k = 0; k < R; ++k) {
      s.weight(k) += alpha(k, i);
      s.first(k) += alpha(k, i) * u(i);
    }
  }
  return s;
}

Vector weighted_square_deviation(const Matrix& alpha, const Vector& u, const Vector& mu) {
  const Eigen::Index R = alpha.rows();
  Vector out = Vector::Zero(R);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    for (Eigen::Index k = 0; k < R; ++k) {
      const double d = u(i) - mu(k);
      out(k) += alpha(k, i) * d * d;
    }
  }
  return out;
}

QuadraticForm quadratic_form(const Matrix& alpha, const Matrix& Z, const Vector& mu,
                             const Vector& sigma2) {
  const Eigen::Index q = Z.rows();
  const Eigen::Index R = alpha.rows();
  QuadraticForm qf{Vector::Zero(q), Matrix::Zero(q, q)};
  for (Eigen::Index i = 0; i < Z.cols(); ++i) {
    double c = 0.0;
    double d = 0.0;
    for (Eigen::Index k = 0; k < R; ++k) {
      c += alpha(k, i) / sigma2(k);
      d += alpha(k, i) * mu(k) / sigma2(k);
    }
    for (Eigen::Index r = 0; r < q; ++r) {
      qf.b(r) += d * Z(r, i);
      for (Eigen::Index s = 0; s < q; ++s) qf.A(r, s) += c * Z(r, i) * Z(s, i);
    }
  }
  return qf;
}

double expected_log_term(const Matrix& alpha, const Vector& u, const MogParams& params) {
  const Eigen::Index R = params.components();
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    for (Eigen::Index k = 0; k < R; ++k) {
      const double a = alpha(k, i);
      if (a <= 0.0) continue;
      const double d = u(i) - params.mu()(k);
      const double lp = std::log(params.pi()(k)) - kLogSqrt2Pi -
                        0.5 * std::log(params.sigma2()(k)) - 0.5 * d * d / params.sigma2()(k);
      total += a * (lp - std::log(a));
    }
  }
  return total;
}

}  // namespace pmog::kernels::serial
