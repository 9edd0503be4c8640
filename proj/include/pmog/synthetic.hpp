#pragma once

#include "pmog/mog.hpp"

namespace pmog {

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

/// Parameter ranges of the synthetic MOG sources. Fractions are drawn from
/// U(pi.lo, pi.hi) and normalised.
struct SourceRanges {
  Range pi{0.0, 1.0};
  Range mu{-10.0, 10.0};
  Range sigma2{1.0, 5.0};
};

MogParams draw_mog_params(Eigen::Index components, const SourceRanges& ranges, Rng& rng);
Vector sample_mog(const MogParams& params, Eigen::Index n, Rng& rng);

/// q x n matrix of independent MOG sources, one parameter draw per row.
Matrix generate_mog_sources(Eigen::Index q, Eigen::Index components, Eigen::Index n,
                            const SourceRanges& ranges, Rng& rng);

/// p x q matrix with entries from U(0, 1).
Matrix uniform_mixing(Eigen::Index p, Eigen::Index q, Rng& rng);

/// Entries from N(0, 1).
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace pmog
