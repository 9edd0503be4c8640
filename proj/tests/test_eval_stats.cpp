#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "pmog/error.hpp"
#include "pmog/eval_stats.hpp"
#include "test_support.hpp"

using namespace pmog;
using doctest::Approx;
using testsupport::random_matrix;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double skewness(const Vector& x) {
  const double m = x.mean();
  const double s2 = (x.array() - m).square().mean();
  return (x.array() - m).cube().mean() / std::pow(s2, 1.5);
}

}  // namespace

TEST_CASE("match_score examples") {
  Rng rng(1);
  const Matrix S = random_matrix(3, 200, rng);
  CHECK(match_score(S, S) == Approx(1.0).epsilon(1e-12));

  Matrix P(3, 3);
  P << 0, -2, 0, 0, 0, 0.5, 3, 0, 0;
  CHECK(match_score(S, P * S) == Approx(1.0).epsilon(1e-12));

}

TEST_CASE("match_score with fewer estimated rows") {
  Matrix A(2, 3), B(1, 3);
  A << 1, 2, 3, 3, 1, 2;
  B << 1, 2, 3;
  CHECK(correlation(A.row(1).transpose(), B.row(0).transpose()) == Approx(-0.5).epsilon(1e-14));
  CHECK(match_score(A, B) == Approx(0.75).epsilon(1e-14));
}

TEST_CASE("match_score half-correlated example") {
  // Exact correlation 0.5 via a shared component.
  Vector base(4), other(4), mix(4);
  base << 1, -1, 1, -1;
  other << 1, 1, -1, -1;
  mix = 0.5 * base + std::sqrt(0.75) * other;
  Matrix A(1, 4), B(1, 4);
  A.row(0) = base.transpose();
  B.row(0) = mix.transpose();
  CHECK(match_score(A, B) == Approx(0.5).epsilon(1e-12));
  Matrix A2(2, 4), B2(2, 4);
  A2 << base.transpose(), other.transpose();
  B2 << base.transpose(), mix.transpose();
  CHECK(match_score(A2, B2) == Approx((1.0 + std::sqrt(0.75)) / 2.0).epsilon(1e-12));
}

TEST_CASE("match_score invariances and errors") {
  Rng rng(2);
  const Matrix A = random_matrix(4, 100, rng);
  const Matrix B = random_matrix(4, 100, rng);
  const double m = match_score(A, B);
  CHECK(m >= 0.0);
  CHECK(m <= 1.0);
  Matrix B2 = B;
  B2.row(0).swap(B2.row(3));
  B2.row(1) *= -7.0;
  B2.row(2).array() += 4.0;
  CHECK(match_score(A, B2) == Approx(m).epsilon(1e-12));
  CHECK(match_score(A, random_matrix(3, 100, rng)) <= 1.0);
  CHECK_THROWS_AS(match_score(A, random_matrix(4, 99, rng)), Error);
  Matrix C = B;
  C.row(2).setConstant(1.0);
  CHECK_THROWS_AS(match_score(A, C), Error);
}

TEST_CASE("to_normality small example") {
  const Vector y = to_normality(vec({0.2, 0.9, 0.5}));
  // ranks 1,3,2 -> quantiles of 1/6, 5/6, 1/2
  const double z = 0.9674215661017010;
  const double mean = (0.2 + 0.9 + 0.5) / 3;
  const double sd = std::sqrt(((0.2 - mean) * (0.2 - mean) + (0.9 - mean) * (0.9 - mean) + (0.5 - mean) * (0.5 - mean)) / 2);
  CHECK(y(0) == Approx(mean - sd * z).epsilon(1e-12));
  CHECK(y(1) == Approx(mean + sd * z).epsilon(1e-12));
  CHECK(y(2) == Approx(mean).epsilon(1e-12));

  const Vector t = to_normality(vec({10, 20, 30}));
  CHECK(t(0) == Approx(20.0 - 10.0 * z).epsilon(1e-12));
  CHECK(t(1) == Approx(20.0).epsilon(1e-12));
  CHECK(t(2) == Approx(20.0 + 10.0 * z).epsilon(1e-12));
}

TEST_CASE("to_normality properties") {
  Rng rng(3);
  std::exponential_distribution<double> ex(1.0);
  Vector x(200);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = ex(rng);
  const Vector y = to_normality(x);
  CHECK(y.mean() == Approx(x.mean()).epsilon(1e-12));
  CHECK(std::abs(skewness(y)) < 0.3);
  CHECK(skewness(x) > 1.0);

  const Vector y2 = to_normality((x.array().log() * 3.0 + 1.0).matrix());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index j = 0; j < 20; ++j)
      if (x(i) < x(j)) CHECK(y2(i) < y2(j));

  const Vector ties = to_normality(vec({1.0, 1.0, 2.0, 3.0}));
  CHECK(ties(0) == ties(1));
  CHECK(ties.mean() == Approx(7.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("welch_t_test examples") {
  const Vector a = vec({1, 2, 3, 4, 5});
  const Vector b = vec({2, 3, 4, 5, 6});
  const WelchResult r = welch_t_test(a, b);
  CHECK(r.t == Approx(-1.0).epsilon(1e-12));
  CHECK(r.dof == Approx(8.0).epsilon(1e-12));
  CHECK(r.p == Approx(0.34659).epsilon(1e-4));

  const WelchResult s = welch_t_test(b, a);
  CHECK(s.t == Approx(-r.t).epsilon(1e-12));
  CHECK(s.p == Approx(r.p).epsilon(1e-12));

  const WelchResult same = welch_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(welch_t_test(vec({1, 1, 1}), vec({2, 2, 2})), Error);
  CHECK_THROWS_AS(welch_t_test(vec({1}), vec({2, 3})), Error);
}

TEST_CASE("welch_t_test against an independent oracle") {
  Rng rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(10 + trial), y(7 + 2 * trial);
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = 0.4 + 2.0 * g(rng);
    const double vx = (x.array() - x.mean()).square().sum() / (x.size() - 1) / x.size();
    const double vy = (y.array() - y.mean()).square().sum() / (y.size() - 1) / y.size();
    const double t = (x.mean() - y.mean()) / std::sqrt(vx + vy);
    const double dof = (vx + vy) * (vx + vy) /
                       (vx * vx / (x.size() - 1) + vy * vy / (y.size() - 1));
    const double p = 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(dof), std::abs(t)));
    const WelchResult r = welch_t_test(x, y);
    CHECK(r.t == Approx(t).epsilon(1e-12));
    CHECK(r.dof == Approx(dof).epsilon(1e-12));
    CHECK(r.p == Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("incomplete beta and t cdf") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 40.0})
    for (double b : {0.5, 3.0, 17.0})
      for (double x : {0.0, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0})
        CHECK(regularized_incomplete_beta(a, b, x) == Approx(boost::math::ibeta(a, b, x)).epsilon(1e-11));
  for (double dof : {1.0, 2.0, 7.5, 100.0})
    for (double t : {-6.0, -1.0, 0.0, 0.3, 2.0})
      CHECK(student_t_cdf(t, dof) == Approx(boost::math::cdf(boost::math::students_t(dof), t)).epsilon(1e-11));
}

TEST_CASE("compare_match pipeline") {
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.8, 0.95);
  Vector a(30), b(30);
  for (auto& v : a) v = u(rng);
  for (auto& v : b) v = u(rng) + 0.03;
  const MatchReport rep = compare_match(a, b);
  const WelchResult ref = welch_t_test(to_normality(a), to_normality(b));
  CHECK(rep.t_stat == Approx(ref.t).epsilon(1e-12));
  CHECK(rep.p_value == Approx(ref.p).epsilon(1e-12));
  CHECK(rep.t_stat < 0.0);
}
