#pragma once

#include <vector>

#include "pmog/mog.hpp"

namespace pmog {

struct KMeansConfig {
  int max_iters = 50;
  bool plusplus_seeding = true;
};

struct KMeans1d {
  Vector centroids;
  std::vector<Eigen::Index> labels;
};

/// Lloyd's algorithm on scalar data, seeded by k-means++ (or uniform picks).
KMeans1d kmeans_1d(const Vector& u, Eigen::Index clusters, const KMeansConfig& config, Rng& rng);

/// Mixture initialisation from a clustering: fractions clamped to at least
/// 1/(10R) and renormalised, centroids as means, within-cluster variances
/// floored at 1e-3 var(u).
MogParams mog_from_clusters(const Vector& u, const KMeans1d& clustering);

}  // namespace pmog
