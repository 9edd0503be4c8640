#include "pmog/eval_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace pmog {

namespace {

double sample_var(const Vector& x) {
  const double mean = x.mean();
  return (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  fail(ErrorCode::NotConverged, "incomplete beta continued fraction did not converge");
}

}  // namespace

double correlation(const Vector& x, const Vector& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidArgument,
          "correlation needs two equal-length rows of at least two samples");
  const Eigen::ArrayXd cx = x.array() - x.mean();
  const Eigen::ArrayXd cy = y.array() - y.mean();
  const double denom = std::sqrt(cx.square().sum() * cy.square().sum());
  require(denom > 0, ErrorCode::ConstantRow, "correlation with a constant row");
  return std::clamp((cx * cy).sum() / denom, -1.0, 1.0);
}

double match_score(const Matrix& A, const Matrix& B) {
  require(A.cols() == B.cols(), ErrorCode::ShapeMismatch,
          "Match needs equal sample counts");
  require(A.cols() >= 2 && A.rows() >= 1 && B.rows() >= 1, ErrorCode::InvalidArgument,
          "Match needs at least one row and two samples");
  auto standardize = [](const Matrix& M, const char* which) {
    Matrix C = M.colwise() - M.rowwise().mean();
    for (Eigen::Index r = 0; r < C.rows(); ++r) {
      const double norm = C.row(r).norm();
      if (!(norm > 0.0)) {
        std::ostringstream os;
        os << "row " << r << " of " << which << " is constant";
        fail(ErrorCode::ConstantRow, os.str());
      }
      C.row(r) /= norm;
    }
    return C;
  };
  const Matrix a = standardize(A, "the first argument");
  const Matrix b = standardize(B, "the second argument");
  const Matrix corr = (a * b.transpose()).cwiseAbs().cwiseMin(1.0);
  return corr.rowwise().maxCoeff().mean();
}

Vector to_normality(const Vector& x) {
  const Eigen::Index m = x.size();
  require(m >= 3, ErrorCode::InvalidArgument, "normality transform needs at least 3 values");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return x(a) < x(b); });

  Vector rank(m);
  for (Eigen::Index i = 0; i < m;) {
    Eigen::Index j = i;
    while (j + 1 < m && x(order[static_cast<std::size_t>(j + 1)]) == x(order[static_cast<std::size_t>(i)])) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) rank(order[static_cast<std::size_t>(k)]) = shared;
    i = j + 1;
  }

  const boost::math::normal_distribution<double> standard;
  Vector z(m);
  for (Eigen::Index i = 0; i < m; ++i)
    z(i) = boost::math::quantile(standard, (rank(i) - 0.5) / static_cast<double>(m));
  // Without ties the scores are symmetric and already centred; centring keeps
  // the output mean exact when ties break the symmetry.
  z.array() -= z.mean();
  return (x.mean() + std::sqrt(sample_var(x)) * z.array()).matrix();
}

double regularized_incomplete_beta(double a, double b, double x) {
  require(a > 0 && b > 0, ErrorCode::InvalidArgument, "beta parameters must be positive");
  require(x >= 0 && x <= 1, ErrorCode::InvalidArgument, "incomplete beta argument outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  require(dof > 0, ErrorCode::InvalidArgument, "degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
  return t > 0 ? 1.0 - tail : tail;
}

WelchResult welch_t_test(const Vector& x, const Vector& y) {
  require(x.size() >= 2 && y.size() >= 2, ErrorCode::InvalidArgument,
          "each group needs at least two values");
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double vx = sample_var(x);
  const double vy = sample_var(y);
  if (!(vx > 0.0) || !(vy > 0.0)) fail(ErrorCode::ZeroVariance, "a group has zero variance");
  const double ex = vx / nx;
  const double ey = vy / ny;
  WelchResult r;
  r.t = (x.mean() - y.mean()) / std::sqrt(ex + ey);
  r.dof = (ex + ey) * (ex + ey) / (ex * ex / (nx - 1.0) + ey * ey / (ny - 1.0));
  r.p = regularized_incomplete_beta(0.5 * r.dof, 0.5, r.dof / (r.dof + r.t * r.t));
  r.p = std::clamp(r.p, std::numeric_limits<double>::min(), 1.0);
  return r;
}

MatchReport compare_match(const Vector& match_a, const Vector& match_b) {
  MatchReport rep;
  rep.match_a = match_a;
  rep.match_b = match_b;
  rep.transformed_a = to_normality(match_a);
  rep.transformed_b = to_normality(match_b);
  const WelchResult w = welch_t_test(rep.transformed_a, rep.transformed_b);
  rep.t_stat = w.t;
  rep.dof = w.dof;
  rep.p_value = w.p;
  return rep;
}

}  // namespace pmog
