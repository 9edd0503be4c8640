#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "pmog/error.hpp"

namespace pmog {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// q x n matrix of column samples. Rows are dimensions, columns are samples.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Eigen::Index dims() const noexcept { return values_.rows(); }
  Eigen::Index samples() const noexcept { return values_.cols(); }
  auto sample(Eigen::Index i) const { return values_.col(i); }

 private:
  Matrix values_;
};

/// RNG stream for independent work item `stream` under a base seed.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) { return Rng(seed + stream); }

}  // namespace pmog
