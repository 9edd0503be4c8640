#include <doctest.h>

#include <omp.h>

#include <random>

#include "pmog/kernels.hpp"

using namespace pmog;
namespace ks = pmog::kernels::serial;
namespace kp = pmog::kernels::parallel;

namespace {

struct Case {
  Matrix Z;
  Vector w;
  Vector u;
  Matrix alpha;
  MogParams params{Vector::Ones(1), Vector::Zero(1), Vector::Ones(1)};
};

// n deliberately not a multiple of the chunk size.
Case make_case(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> n01;
  Case c;
  c.Z.resize(4, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < 4; ++i) c.Z(i, j) = n01(rng);
  c.w = Vector::LinSpaced(4, 0.2, 1.0).normalized();
  c.params = MogParams((Vector(3) << 0.2, 0.5, 0.3).finished(), (Vector(3) << -1.0, 0.0, 1.5).finished(),
                       (Vector(3) << 0.3, 1.0, 0.7).finished());
  ks::project(c.Z, c.w, c.u);
  ks::responsibilities(c.u, c.params, c.alpha);
  return c;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
  for (Eigen::Index n : {1, 7, 512, 1537, 5000}) {
    const Case c = make_case(n, static_cast<std::uint64_t>(n));
    Vector u;
    kp::project(c.Z, c.w, u);
    CHECK((u - c.u).cwiseAbs().maxCoeff() <= 1e-13);

    CHECK(rel(kp::log_likelihood(c.u, c.params).log_likelihood,
              ks::log_likelihood(c.u, c.params).log_likelihood) <= 1e-12);

    Matrix alpha;
    const auto lr = kp::responsibilities(c.u, c.params, alpha);
    CHECK((alpha - c.alpha).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(lr.bad_sample == -1);

    const auto sp = kp::component_sums(c.alpha, c.u);
    const auto ss = ks::component_sums(c.alpha, c.u);
    CHECK((sp.weight - ss.weight).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((sp.first - ss.first).cwiseAbs().maxCoeff() <= 1e-10);

    const Vector mu = c.params.mu();
    CHECK((kp::weighted_square_deviation(c.alpha, c.u, mu) - ks::weighted_square_deviation(c.alpha, c.u, mu))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);

    const QuadraticForm qp = kp::quadratic_form(c.alpha, c.Z, mu, c.params.sigma2());
    const QuadraticForm qs = ks::quadratic_form(c.alpha, c.Z, mu, c.params.sigma2());
    CHECK((qp.b - qs.b).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((qp.A - qs.A).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(qp.A == qp.A.transpose());

    CHECK(rel(kp::expected_log_term(c.alpha, c.u, c.params), ks::expected_log_term(c.alpha, c.u, c.params)) <=
          1e-12);
  }
}

TEST_CASE("parallel kernels are bit-identical across thread counts") {
  const Case c = make_case(6000, 99);
  struct Out {
    double ll, q;
    Matrix alpha, A;
    Vector b, w, f;
  };
  auto run = [&](int threads) {
    omp_set_num_threads(threads);
    Out o;
    o.ll = kp::responsibilities(c.u, c.params, o.alpha).log_likelihood;
    o.q = kp::expected_log_term(o.alpha, c.u, c.params);
    const auto s = kp::component_sums(o.alpha, c.u);
    o.w = s.weight;
    o.f = s.first;
    const QuadraticForm qf = kp::quadratic_form(o.alpha, c.Z, c.params.mu(), c.params.sigma2());
    o.A = qf.A;
    o.b = qf.b;
    return o;
  };
  const Out one = run(1);
  for (int t : {2, 3, 4}) {
    const Out other = run(t);
    CHECK(one.ll == other.ll);
    CHECK(one.q == other.q);
    CHECK(one.alpha == other.alpha);
    CHECK(one.A == other.A);
    CHECK(one.b == other.b);
    CHECK(one.w == other.w);
    CHECK(one.f == other.f);
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("likelihood kernels flag the first non-finite sample") {
  const MogParams tight(Vector::Ones(1), Vector::Zero(1), Vector::Constant(1, 1e-300));
  Vector u = Vector::Zero(1200);
  u(700) = 1e200;
  u(900) = 1e200;
  CHECK(ks::log_likelihood(u, tight).bad_sample == 700);
  CHECK(kp::log_likelihood(u, tight).bad_sample == 700);
}
