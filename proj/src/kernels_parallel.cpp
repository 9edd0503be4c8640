#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <omp.h>

#include "pmog/kernels.hpp"

namespace pmog::kernels::parallel {

namespace {

Eigen::Index chunk_count(Eigen::Index n) { return (n + kChunk - 1) / kChunk; }

struct ChunkRange {
  Eigen::Index begin;
  Eigen::Index end;
};

ChunkRange chunk_range(Eigen::Index c, Eigen::Index n) {
  return {c * kChunk, std::min(n, (c + 1) * kChunk)};
}

// log pi_k - log sqrt(2 pi sigma2_k) and 1 / sigma2_k, hoisted out of the
// per-sample loop.
struct ComponentConstants {
  Vector log_norm;
  Vector inv_var;

  explicit ComponentConstants(const MogParams& p)
      : log_norm(p.components()), inv_var(p.components()) {
    for (Eigen::Index k = 0; k < p.components(); ++k) {
      log_norm(k) = std::log(p.pi()(k)) - kLogSqrt2Pi - 0.5 * std::log(p.sigma2()(k));
      inv_var(k) = 1.0 / p.sigma2()(k);
    }
  }
};

LikelihoodResult combine(const std::vector<LikelihoodResult>& parts) {
  LikelihoodResult out;
  for (const auto& p : parts) {
    out.log_likelihood += p.log_likelihood;
    if (out.bad_sample < 0) out.bad_sample = p.bad_sample;
  }
  return out;
}

template <typename Store>
LikelihoodResult likelihood_impl(const Vector& u, const MogParams& params, Store store) {
  const Eigen::Index n = u.size();
  const Eigen::Index R = params.components();
  const ComponentConstants cc(params);
  const Eigen::Index chunks = chunk_count(n);
  std::vector<LikelihoodResult> parts(static_cast<std::size_t>(chunks));

#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const auto [begin, end] = chunk_range(c, n);
    Vector terms(R);
    LikelihoodResult part;
    for (Eigen::Index i = begin; i < end; ++i) {
      double top = -std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < R; ++k) {
        const double d = u(i) - params.mu()(k);
        terms(k) = cc.log_norm(k) - 0.5 * d * d * cc.inv_var(k);
        top = std::max(top, terms(k));
      }
      double acc = 0.0;
      for (Eigen::Index k = 0; k < R; ++k) {
        terms(k) = std::exp(terms(k) - top);
        acc += terms(k);
      }
      store(i, terms, acc);
      const double ld = top + std::log(acc);
      if (!std::isfinite(ld) && part.bad_sample < 0) part.bad_sample = i;
      part.log_likelihood += ld;
    }
    parts[static_cast<std::size_t>(c)] = part;
  }
  return combine(parts);
}

}  // namespace

void project(const Matrix& Z, const Vector& w, Vector& u) {
  const Eigen::Index n = Z.cols();
  u.resize(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunk_count(n); ++c) {
    const auto [begin, end] = chunk_range(c, n);
    u.segment(begin, end - begin).noalias() = Z.middleCols(begin, end - begin).transpose() * w;
  }
}

LikelihoodResult log_likelihood(const Vector& u, const MogParams& params) {
  return likelihood_impl(u, params, [](Eigen::Index, const Vector&, double) {});
}

LikelihoodResult responsibilities(const Vector& u, const MogParams& params, Matrix& alpha) {
  alpha.resize(params.components(), u.size());
  return likelihood_impl(u, params, [&alpha](Eigen::Index i, const Vector& terms, double acc) {
    alpha.col(i) = terms / acc;
  });
}

ComponentSums component_sums(const Matrix& alpha, const Vector& u) {
  const Eigen::Index n = u.size();
  const Eigen::Index R = alpha.rows();
  const Eigen::Index chunks = chunk_count(n);
  std::vector<ComponentSums> parts(static_cast<std::size_t>(chunks));

#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const auto [begin, end] = chunk_range(c, n);
    const auto block = alpha.middleCols(begin, end - begin);
    const auto seg = u.segment(begin, end - begin);
    parts[static_cast<std::size_t>(c)] = {block.rowwise().sum(), block * seg};
  }

  ComponentSums out{Vector::Zero(R), Vector::Zero(R)};
  for (const auto& p : parts) {
    out.weight += p.weight;
    out.first += p.first;
  }
  return out;
}

Vector weighted_square_deviation(const Matrix& alpha, const Vector& u, const Vector& mu) {
  const Eigen::Index n = u.size();
  const Eigen::Index R = alpha.rows();
  const Eigen::Index chunks = chunk_count(n);
  std::vector<Vector> parts(static_cast<std::size_t>(chunks));

#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const auto [begin, end] = chunk_range(c, n);
    Vector acc = Vector::Zero(R);
    for (Eigen::Index i = begin; i < end; ++i) {
      for (Eigen::Index k = 0; k < R; ++k) {
        const double d = u(i) - mu(k);
        acc(k) += alpha(k, i) * d * d;
      }
    }
    parts[static_cast<std::size_t>(c)] = std::move(acc);
  }

  Vector out = Vector::Zero(R);
  for (const auto& p : parts) out += p;
  return out;
}

QuadraticForm quadratic_form(const Matrix& alpha, const Matrix& Z, const Vector& mu,
                             const Vector& sigma2) {
  const Eigen::Index n = Z.cols();
  const Eigen::Index q = Z.rows();
  const Eigen::Index chunks = chunk_count(n);
  const Vector inv_var = sigma2.cwiseInverse();
  const Vector mu_over_var = mu.cwiseProduct(inv_var);
  std::vector<QuadraticForm> parts(static_cast<std::size_t>(chunks));

#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const auto [begin, end] = chunk_range(c, n);
    const auto block = alpha.middleCols(begin, end - begin);
    const auto Zc = Z.middleCols(begin, end - begin);
    const Vector weight = block.transpose() * inv_var;
    const Vector shift = block.transpose() * mu_over_var;
    QuadraticForm part;
    part.b.noalias() = Zc * shift;
    part.A.noalias() = Zc * weight.asDiagonal() * Zc.transpose();
    parts[static_cast<std::size_t>(c)] = std::move(part);
  }

  QuadraticForm out{Vector::Zero(q), Matrix::Zero(q, q)};
  for (const auto& p : parts) {
    out.b += p.b;
    out.A += p.A;
  }
  // Round-off can leave A a few ulps from symmetric.
  out.A = 0.5 * (out.A + out.A.transpose()).eval();
  return out;
}

double expected_log_term(const Matrix& alpha, const Vector& u, const MogParams& params) {
  const Eigen::Index n = u.size();
  const Eigen::Index R = params.components();
  const ComponentConstants cc(params);
  const Eigen::Index chunks = chunk_count(n);
  std::vector<double> parts(static_cast<std::size_t>(chunks), 0.0);

#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const auto [begin, end] = chunk_range(c, n);
    double acc = 0.0;
    for (Eigen::Index i = begin; i < end; ++i) {
      for (Eigen::Index k = 0; k < R; ++k) {
        const double a = alpha(k, i);
        if (a <= 0.0) continue;
        const double d = u(i) - params.mu()(k);
        acc += a * (cc.log_norm(k) - 0.5 * d * d * cc.inv_var(k) - std::log(a));
      }
    }
    parts[static_cast<std::size_t>(c)] = acc;
  }

  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

}  // namespace pmog::kernels::parallel
