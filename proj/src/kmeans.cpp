#include "pmog/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmog/pmog_em.hpp"

namespace pmog {

namespace {

Eigen::Index nearest(const Vector& centroids, double x) {
  Eigen::Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < centroids.size(); ++k) {
    const double d = std::abs(x - centroids(k));
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

Vector seed_centroids(const Vector& u, Eigen::Index clusters, bool plusplus, Rng& rng) {
  const Eigen::Index n = u.size();
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Vector c(clusters);
  if (!plusplus) {
    for (Eigen::Index k = 0; k < clusters; ++k) c(k) = u(pick(rng));
    return c;
  }
  c(0) = u(pick(rng));
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = (u(i) - c(0)) * (u(i) - c(0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index k = 1; k < clusters; ++k) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total <= 0.0) {
      chosen = pick(rng);
    } else {
      double target = unit(rng) * total;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2(i);
        if (target <= 0.0) {
          chosen = i;
          break;
        }
      }
    }
    c(k) = u(chosen);
    for (Eigen::Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), (u(i) - c(k)) * (u(i) - c(k)));
  }
  return c;
}

}  // namespace

KMeans1d kmeans_1d(const Vector& u, Eigen::Index clusters, const KMeansConfig& config, Rng& rng) {
  require(clusters > 0 && u.size() >= clusters, ErrorCode::InvalidArgument,
          "k-means needs at least as many points as clusters");
  KMeans1d out;
  out.centroids = seed_centroids(u, clusters, config.plusplus_seeding, rng);
  out.labels.assign(static_cast<std::size_t>(u.size()), 0);

  for (int it = 0; it < config.max_iters; ++it) {
    bool changed = it == 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const auto k = nearest(out.centroids, u(i));
      if (out.labels[static_cast<std::size_t>(i)] != k) changed = true;
      out.labels[static_cast<std::size_t>(i)] = k;
    }
    if (!changed) break;
    Vector sum = Vector::Zero(clusters);
    Vector count = Vector::Zero(clusters);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const auto k = out.labels[static_cast<std::size_t>(i)];
      sum(k) += u(i);
      count(k) += 1.0;
    }
    // Empty clusters keep their previous centroid.
    for (Eigen::Index k = 0; k < clusters; ++k)
      if (count(k) > 0.0) out.centroids(k) = sum(k) / count(k);
  }
  return out;
}

MogParams mog_from_clusters(const Vector& u, const KMeans1d& clustering) {
  const Eigen::Index R = clustering.centroids.size();
  const double n = static_cast<double>(u.size());
  const double floor = 1e-3 * sample_variance(u);

  Vector count = Vector::Zero(R);
  Vector sum = Vector::Zero(R);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const auto k = clustering.labels[static_cast<std::size_t>(i)];
    count(k) += 1.0;
    sum(k) += u(i);
  }
  Vector mu = clustering.centroids;
  for (Eigen::Index k = 0; k < R; ++k)
    if (count(k) > 0.0) mu(k) = sum(k) / count(k);

  Vector ss = Vector::Zero(R);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const auto k = clustering.labels[static_cast<std::size_t>(i)];
    ss(k) += (u(i) - mu(k)) * (u(i) - mu(k));
  }
  Vector sigma2(R);
  for (Eigen::Index k = 0; k < R; ++k)
    sigma2(k) = std::max(count(k) > 0.0 ? ss(k) / count(k) : 0.0, std::max(floor, 1e-300));

  Vector pi = (count / n).cwiseMax(1.0 / (10.0 * static_cast<double>(R)));
  pi /= pi.sum();
  return MogParams(pi, mu, sigma2);
}

}  // namespace pmog
