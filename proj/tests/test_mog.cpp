#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pmog/mog.hpp"

using namespace pmog;
using doctest::Approx;

namespace {

double normal_pdf(double x, double mu, double s2) {
  return std::exp(-0.5 * (x - mu) * (x - mu) / s2) / std::sqrt(2.0 * std::numbers::pi * s2);
}

MogParams random_params(Eigen::Index R, Rng& rng) {
  std::uniform_real_distribution<double> u01(0.05, 1.0), umu(-3.0, 3.0), us2(0.2, 3.0);
  Vector pi(R), mu(R), s2(R);
  for (Eigen::Index k = 0; k < R; ++k) {
    pi(k) = u01(rng);
    mu(k) = umu(rng);
    s2(k) = us2(rng);
  }
  pi /= pi.sum();
  pi(R - 1) = 1.0 - pi.head(R - 1).sum();
  return MogParams(pi, mu, s2);
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  std::normal_distribution<double> n01;
  Matrix M(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) M(i, j) = n01(rng);
  return M;
}

}  // namespace

TEST_CASE("mog_pdf matches standard normal and collapses duplicates") {
  const MogParams one(Vector::Ones(1), Vector::Zero(1), Vector::Ones(1));
  CHECK(mog_pdf(0.0, one) == Approx(0.3989422804).epsilon(1e-10));
  const MogParams dup(Vector::Constant(2, 0.5), Vector::Zero(2), Vector::Ones(2));
  CHECK(mog_pdf(0.0, dup) == Approx(0.3989422804).epsilon(1e-10));
}

TEST_CASE("mog_pdf equals the sum of its weighted components") {
  const MogParams p((Vector(2) << 0.3, 0.7).finished(), (Vector(2) << -1.0, 2.0).finished(),
                    (Vector(2) << 1.0, 4.0).finished());
  const double oracle = 0.3 * normal_pdf(0.0, -1.0, 1.0) + 0.7 * normal_pdf(0.0, 2.0, 4.0);
  CHECK(mog_pdf(0.0, p) == Approx(oracle).epsilon(1e-14));
}

TEST_CASE("mog_pdf integrates to one") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const MogParams p = random_params(4, rng);
    const Vector sd = p.sigma2().cwiseSqrt();
    const double lo = (p.mu() - 10.0 * sd).minCoeff();
    const double hi = (p.mu() + 10.0 * sd).maxCoeff();
    const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return mog_pdf(x, p); }, lo, hi, 15, 1e-12);
    CHECK(mass == Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("MogParams rejects invalid parameters") {
  CHECK_THROWS_AS(MogParams(Vector::Constant(2, 0.6), Vector::Zero(2), Vector::Ones(2)), Error);
  CHECK_THROWS_AS(MogParams(Vector::Constant(2, 0.5), Vector::Zero(2), Vector::Zero(2)), Error);
  CHECK_THROWS_AS(MogParams(Vector::Ones(1), Vector::Zero(2), Vector::Ones(2)), Error);
  CHECK_THROWS_AS(DataMatrix(Matrix::Constant(2, 2, std::nan(""))), Error);
}

TEST_CASE("log_likelihood_h1 closed cases") {
  const MogParams std_normal(Vector::Ones(1), Vector::Zero(1), Vector::Ones(1));
  const DataMatrix Z1(Matrix::Identity(2, 1));
  CHECK(log_likelihood_h1(Z1, Vector::Unit(2, 0), std_normal) == Approx(-1.4189385332).epsilon(1e-10));

  Rng rng(11);
  const DataMatrix Z(random_matrix(3, 40, rng));
  CHECK(log_likelihood_h1(Z, Vector::Zero(3), std_normal) ==
        Approx(40.0 * std::log(0.3989422804014327)).epsilon(1e-12));
}

TEST_CASE("log_likelihood_h1 matches a per-sample loop and ignores component order") {
  Rng rng(5);
  const DataMatrix Z(random_matrix(3, 50, rng));
  const Vector w = random_matrix(3, 1, rng).col(0);
  const MogParams p = random_params(2, rng);
  double oracle = 0.0;
  for (Eigen::Index i = 0; i < 50; ++i) {
    const double u = w.dot(Z.sample(i));
    oracle += std::log(p.pi()(0) * normal_pdf(u, p.mu()(0), p.sigma2()(0)) +
                       p.pi()(1) * normal_pdf(u, p.mu()(1), p.sigma2()(1)));
  }
  CHECK(log_likelihood_h1(Z, w, p) == Approx(oracle).epsilon(1e-10));

  const MogParams swapped(p.pi().reverse(), p.mu().reverse(), p.sigma2().reverse());
  CHECK(log_likelihood_h1(Z, w, swapped) == Approx(log_likelihood_h1(Z, w, p)).epsilon(1e-14));
}

TEST_CASE("log_likelihood_h1 reports underflow") {
  const MogParams tight(Vector::Ones(1), Vector::Zero(1), Vector::Constant(1, 1e-300));
  const DataMatrix Z(Matrix::Constant(1, 3, 1e200));
  CHECK_THROWS_AS(log_likelihood_h1(Z, Vector::Ones(1), tight), Error);
}

TEST_CASE("log_prior_h2 values") {
  const MogParams p(Vector::Constant(2, 0.5), Vector::Zero(2), Vector::Ones(2));
  CHECK(log_prior_h2(p, PriorConfig::neutral(2)) == 0.0);

  const MogParams single(Vector::Ones(1), Vector::Zero(1), Vector::Constant(1, 2.0));
  const PriorConfig one{Vector::Constant(1, 2.0), Vector::Constant(1, 1.0), Vector::Constant(1, 100.0)};
  CHECK(log_prior_h2(single, one) == Approx(-2.0 * std::log(2.0) - 1.0 / 200.0).epsilon(1e-14));

  const PriorConfig pr{Vector::Constant(2, 2.0), Vector::Constant(2, 1.0), Vector::Constant(2, 100.0)};
  const double oracle = 2.0 * std::log(0.5) - 2.0 * 2.0 * std::log(1.0) - 2.0 / 100.0;
  CHECK(log_prior_h2(p, pr) == Approx(oracle).epsilon(1e-14));
}

TEST_CASE("variance collapse is penalised by the prior") {
  const MogParams p(Vector::Constant(2, 0.5), Vector::Zero(2), (Vector(2) << 1e-8, 1.0).finished());
  const PriorConfig pr{Vector::Constant(2, 2.0), Vector::Constant(2, 1.0), Vector::Constant(2, 100.0)};
  CHECK(log_prior_h2(p, pr) < -1e5);
}

TEST_CASE("objective_h is H1 plus H2") {
  Rng rng(7);
  const DataMatrix Z(random_matrix(2, 20, rng));
  const Vector w = Vector::Ones(2).normalized();
  const MogParams p = random_params(2, rng);
  const PriorConfig pr = PriorConfig::defaults(2, 1.3);
  CHECK(objective_h(Z, w, p, PriorConfig::neutral(2)) == log_likelihood_h1(Z, w, p));
  CHECK(objective_h(Z, w, p, pr) ==
        Approx(log_likelihood_h1(Z, w, p) + log_prior_h2(p, pr)).epsilon(1e-15));
}

TEST_CASE("e_step responsibilities") {
  const MogParams sym(Vector::Constant(2, 0.5), (Vector(2) << -1.0, 1.0).finished(), Vector::Ones(2));
  const DataMatrix Z0(Matrix::Zero(1, 1));
  const Responsibilities r0 = e_step(Z0, Vector::Ones(1), sym);
  CHECK(r0.alpha(0, 0) == Approx(0.5).epsilon(1e-15));
  CHECK(r0.alpha(1, 0) == Approx(0.5).epsilon(1e-15));

  Rng rng(13);
  const DataMatrix Z(random_matrix(2, 10, rng));
  const Vector w = Vector::Unit(2, 1);
  const MogParams single(Vector::Ones(1), Vector::Zero(1), Vector::Ones(1));
  CHECK((e_step(Z, w, single).alpha.array() == 1.0).all());

  const MogParams p = random_params(3, rng);
  const Responsibilities r = e_step(Z, w, p);
  for (Eigen::Index i = 0; i < 10; ++i) {
    const double u = w.dot(Z.sample(i));
    double denom = 0.0;
    for (Eigen::Index k = 0; k < 3; ++k) denom += p.pi()(k) * normal_pdf(u, p.mu()(k), p.sigma2()(k));
    for (Eigen::Index k = 0; k < 3; ++k)
      CHECK(r.alpha(k, i) ==
            Approx(p.pi()(k) * normal_pdf(u, p.mu()(k), p.sigma2()(k)) / denom).epsilon(1e-12));
    CHECK(r.alpha.col(i).sum() == Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("e_step and expected term are consistent: Q equals H1 at the E-step point") {
  Rng rng(17);
  const DataMatrix Z(random_matrix(3, 200, rng));
  const Vector w = random_matrix(3, 1, rng).col(0).normalized();
  const MogParams p = random_params(3, rng);
  const Responsibilities r = e_step(Z, w, p);
  CHECK(expected_log_likelihood_q(Z, w, p, r) == Approx(log_likelihood_h1(Z, w, p)).epsilon(1e-12));
}

TEST_CASE("ConstraintSet projector properties") {
  Rng rng(19);
  const Matrix G = random_matrix(5, 2, rng);
  const ConstraintSet cs(G);
  const Matrix& P = cs.projector();
  CHECK((P - P.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((P * P - P).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((P * G).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(P.trace() == Approx(3.0).epsilon(1e-12));
  CHECK(ConstraintSet(4).projector() == Matrix::Identity(4, 4));
  CHECK_THROWS_AS(ConstraintSet(random_matrix(2, 2, rng)), Error);
  Matrix rank_def(4, 2);
  rank_def.col(0) = Vector::Ones(4);
  rank_def.col(1) = 2.0 * Vector::Ones(4);
  CHECK_THROWS_AS(ConstraintSet{rank_def}, Error);
}
