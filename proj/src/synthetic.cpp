#include "pmog/synthetic.hpp"

#include <random>
#include <vector>

namespace pmog {

MogParams draw_mog_params(Eigen::Index components, const SourceRanges& ranges, Rng& rng) {
  require(components >= 1, ErrorCode::InvalidArgument, "need at least one component");
  require(ranges.pi.lo >= 0 && ranges.pi.hi > ranges.pi.lo && ranges.sigma2.lo > 0 &&
              ranges.sigma2.hi >= ranges.sigma2.lo && ranges.mu.hi >= ranges.mu.lo,
          ErrorCode::InvalidArgument, "invalid source parameter ranges");
  std::uniform_real_distribution<double> upi(ranges.pi.lo, ranges.pi.hi);
  std::uniform_real_distribution<double> umu(ranges.mu.lo, ranges.mu.hi);
  std::uniform_real_distribution<double> us2(ranges.sigma2.lo, ranges.sigma2.hi);
  Vector pi(components), mu(components), s2(components);
  for (Eigen::Index k = 0; k < components; ++k) pi(k) = upi(rng);
  for (Eigen::Index k = 0; k < components; ++k) mu(k) = umu(rng);
  for (Eigen::Index k = 0; k < components; ++k) s2(k) = us2(rng);
  if (!(pi.sum() > 0)) pi.setOnes();
  pi /= pi.sum();
  pi(components - 1) = 1.0 - pi.head(components - 1).sum();
  return MogParams(pi, mu, s2);
}

Vector sample_mog(const MogParams& params, Eigen::Index n, Rng& rng) {
  std::vector<double> weights(params.pi().data(), params.pi().data() + params.pi().size());
  std::discrete_distribution<Eigen::Index> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index k = pick(rng);
    u(i) = params.mu()(k) + std::sqrt(params.sigma2()(k)) * normal(rng);
  }
  return u;
}

Matrix generate_mog_sources(Eigen::Index q, Eigen::Index components, Eigen::Index n,
                            const SourceRanges& ranges, Rng& rng) {
  Matrix S(q, n);
  for (Eigen::Index j = 0; j < q; ++j) {
    const MogParams params = draw_mog_params(components, ranges, rng);
    S.row(j) = sample_mog(params, n, rng).transpose();
  }
  return S;
}

Matrix uniform_mixing(Eigen::Index p, Eigen::Index q, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix A(p, q);
  for (Eigen::Index j = 0; j < q; ++j)
    for (Eigen::Index i = 0; i < p; ++i) A(i, j) = u(rng);
  return A;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = normal(rng);
  return M;
}

}  // namespace pmog
