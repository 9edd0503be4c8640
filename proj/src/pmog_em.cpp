#include "pmog/pmog_em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pmog/kernels.hpp"

namespace pmog {

namespace {

constexpr double kEmptyComponent = 1e-12;
constexpr double kAdmissible = 1e-12;
constexpr double kConstraintTol = 1e-8;
constexpr double kMonotoneSlack = 1e-8;
constexpr double kVarianceFloor = 1e-10;

void check_components(const Vector& weight) {
  for (Eigen::Index k = 0; k < weight.size(); ++k) {
    if (!(weight(k) >= kEmptyComponent)) {
      std::ostringstream os;
      os << "component " << k << " has total responsibility " << weight(k);
      fail(ErrorCode::EmptyComponent, os.str());
    }
  }
}

Vector projections(const DataMatrix& Z, const Vector& w) {
  require(w.size() == Z.dims(), ErrorCode::InvalidArgument, "projection has wrong length");
  Vector u;
  kernels::parallel::project(Z.values(), w, u);
  return u;
}

bool satisfies_constraints(const Vector& w, const ConstraintSet& cs) {
  if (std::abs(w.norm() - 1.0) > kConstraintTol) return false;
  if (cs.count() > 0 && (cs.G().transpose() * w).cwiseAbs().maxCoeff() > kConstraintTol)
    return false;
  return true;
}

// Levenberg-Marquardt on f(w) = 0 with the damping schedule of NewtonConfig.
// When no damped step reduces ||f||, fall back to backtracking along the pure
// Newton direction, which is always a descent direction for ||f||^2.
NewtonState newton_iterate(const QuadraticForm& qf, const ConstraintSet& cs, Vector w,
                           const NewtonConfig& config) {
  const Eigen::Index q = w.size();
  const Matrix I = Matrix::Identity(q, q);
  NewtonState st;
  st.eta = config.eta0;
  Vector f = cubic_residual(w, qf, cs);
  double fnorm = f.norm();

  auto try_step = [&](const Vector& step) {
    Vector w_try = w - step;
    Vector f_try = cubic_residual(w_try, qf, cs);
    const double n_try = f_try.norm();
    if (std::isfinite(n_try) && n_try < fnorm) {
      w = std::move(w_try);
      f = std::move(f_try);
      fnorm = n_try;
      return true;
    }
    return false;
  };

  int it = 0;
  for (; it < config.max_iters && f.cwiseAbs().maxCoeff() > config.residual_tol; ++it) {
    const Matrix J = cubic_jacobian(w, qf, cs);
    bool moved = false;
    for (int retry = 0; retry <= config.max_damping_retries && !moved; ++retry) {
      Eigen::FullPivLU<Matrix> lu(J + st.eta * I);
      if (lu.isInvertible() && try_step(lu.solve(f))) {
        moved = true;
        st.eta *= config.eta_shrink;
      } else {
        st.eta *= config.eta_grow;
      }
    }
    if (!moved) {
      st.eta = config.eta0;
      Eigen::FullPivLU<Matrix> lu(J);
      if (lu.isInvertible()) {
        const Vector dir = lu.solve(f);
        double t = 1.0;
        for (int ls = 0; ls < 40 && !moved; ++ls, t *= 0.5) moved = try_step(t * dir);
      }
    }
    if (!moved) break;
  }

  // A few undamped polishing steps tighten the norm and orthogonality
  // constraints, which are only implied by f = 0 up to ||f|| / |w^T b - w^T A w|.
  for (int polish = 0; polish < 3 && fnorm > 0.0; ++polish) {
    Eigen::FullPivLU<Matrix> lu(cubic_jacobian(w, qf, cs));
    if (!lu.isInvertible() || !try_step(lu.solve(f))) break;
  }

  st.w = std::move(w);
  st.residual = std::move(f);
  st.iterations = it;
  st.lambda1 = 0.5 * (st.w.dot(qf.b) - st.w.dot(qf.A * st.w));
  return st;
}

}  // namespace

void EmConfig::validate() const {
  require(R >= 1, ErrorCode::InvalidArgument, "R must be positive");
  require(eps_rel > 0 && eps_m > 0 && newton.residual_tol > 0, ErrorCode::InvalidArgument,
          "tolerances must be positive");
  require(max_em_iters > 0 && max_restarts >= 0 && max_m_alternations > 0 && newton.max_iters > 0,
          ErrorCode::InvalidArgument, "iteration limits must be positive");
}

double sample_variance(const Vector& u) {
  const double mean = u.mean();
  return (u.array() - mean).square().sum() / static_cast<double>(u.size());
}

Vector update_pi(const Responsibilities& resp, const Vector& beta) {
  require(beta.size() == resp.components(), ErrorCode::InvalidArgument, "beta has wrong length");
  const Vector counts = resp.alpha.rowwise().sum();
  const double denom = static_cast<double>(resp.samples()) + (beta.array() - 1.0).sum();
  Vector pi = (counts.array() + beta.array() - 1.0) / denom;
  return pi;
}

Vector update_mu(const Responsibilities& resp, const Vector& u) {
  const auto sums = kernels::parallel::component_sums(resp.alpha, u);
  check_components(sums.weight);
  return sums.first.cwiseQuotient(sums.weight);
}

Vector update_mu(const Responsibilities& resp, const DataMatrix& Z, const Vector& w) {
  return update_mu(resp, projections(Z, w));
}

Vector update_sigma2(const Responsibilities& resp, const Vector& u, const Vector& mu,
                     const PriorConfig& priors) {
  const auto sums = kernels::parallel::component_sums(resp.alpha, u);
  check_components(sums.weight);
  const Vector dev = kernels::parallel::weighted_square_deviation(resp.alpha, u, mu);
  const double floor = kVarianceFloor * sample_variance(u);
  Vector sigma2(mu.size());
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    const double inv_gamma = std::isfinite(priors.gamma(k)) ? 1.0 / priors.gamma(k) : 0.0;
    const double v =
        (2.0 * inv_gamma + dev(k)) / (2.0 * (priors.theta(k) + 1.0) + sums.weight(k));
    sigma2(k) = std::max(v, floor);
  }
  return sigma2;
}

Vector update_sigma2(const Responsibilities& resp, const DataMatrix& Z, const Vector& w,
                     const Vector& mu, const PriorConfig& priors) {
  return update_sigma2(resp, projections(Z, w), mu, priors);
}

QuadraticForm assemble_quadratic(const Responsibilities& resp, const DataMatrix& Z,
                                 const Vector& mu, const Vector& sigma2) {
  return kernels::parallel::quadratic_form(resp.alpha, Z.values(), mu, sigma2);
}

Vector cubic_residual(const Vector& w, const QuadraticForm& qf, const ConstraintSet& cs) {
  const Vector Aw = qf.A * w;
  const double c = w.dot(qf.b) - w.dot(Aw);
  return cs.projector() * (qf.b - Aw) - c * w;
}

Matrix cubic_jacobian(const Vector& w, const QuadraticForm& qf, const ConstraintSet& cs) {
  const Eigen::Index q = w.size();
  const Matrix I = Matrix::Identity(q, q);
  const double btw = qf.b.dot(w);
  const double wAw = w.dot(qf.A * w);
  return -cs.projector() * qf.A - w * qf.b.transpose() - btw * I + wAw * I +
         2.0 * w * (w.transpose() * qf.A);
}

double quadratic_value(const Vector& w, const QuadraticForm& qf) {
  return qf.b.dot(w) - 0.5 * w.dot(qf.A * w);
}

std::optional<Vector> newton_init(const QuadraticForm& qf, const ConstraintSet& cs) {
  Eigen::LDLT<Matrix> ldlt(qf.A);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  const Vector raw = ldlt.solve(qf.b);
  if (!raw.allFinite()) return std::nullopt;
  Vector w = cs.projector() * raw;
  const double norm = w.norm();
  if (!(norm > 1e-12)) return std::nullopt;
  return Vector(w / norm);
}

Vector random_constrained_w(const ConstraintSet& cs, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Vector g(cs.dims());
    for (Eigen::Index d = 0; d < g.size(); ++d) g(d) = normal(rng);
    Vector w = cs.projector() * g;
    const double norm = w.norm();
    if (norm >= 1e-8) return w / norm;
  }
}

NewtonState solve_w(const QuadraticForm& qf, const ConstraintSet& cs,
                    const std::optional<Vector>& w_init, const NewtonConfig& config, Rng& rng) {
  require(qf.b.size() == cs.dims() && qf.A.rows() == cs.dims() && qf.A.cols() == cs.dims(),
          ErrorCode::InvalidArgument, "quadratic form and constraints disagree on dimension");
  Vector start;
  if (w_init) {
    require(w_init->size() == cs.dims(), ErrorCode::InvalidArgument, "w_init has wrong length");
    start = *w_init;
  } else if (auto init = newton_init(qf, cs)) {
    start = std::move(*init);
  } else {
    start = random_constrained_w(cs, rng);
  }

  NewtonState st = newton_iterate(qf, cs, std::move(start), config);
  if (!(st.residual.cwiseAbs().maxCoeff() <= config.residual_tol)) {
    std::ostringstream os;
    os << "Newton iteration stalled with residual " << st.residual.cwiseAbs().maxCoeff();
    fail(ErrorCode::SolveFailed, os.str());
  }
  if (std::abs(2.0 * st.lambda1) < kAdmissible)
    fail(ErrorCode::SolveFailed, "root is not admissible (w^T b - w^T A w = 0)");
  if (!satisfies_constraints(st.w, cs))
    fail(ErrorCode::SolveFailed, "root violates the norm or orthogonality constraint");
  return st;
}

MStepResult m_step(const Responsibilities& resp, const DataMatrix& Z, const ConstraintSet& cs,
                   const MogParams& params, const Vector& w, const PriorConfig& priors,
                   const EmConfig& config, Rng& rng) {
  MStepResult out{params, w, 0.0, 0};
  double h_prev = objective_h(Z, out.w, out.params, priors);

  for (int alt = 0; alt < config.max_m_alternations; ++alt) {
    out.alternations = alt + 1;

    // Part 1: closed forms at the current projection.
    const Vector u = projections(Z, out.w);
    const Vector pi = update_pi(resp, priors.beta);
    const Vector mu = update_mu(resp, u);
    const Vector sigma2 = update_sigma2(resp, u, mu, priors);
    out.params = MogParams(pi, mu, sigma2);

    // Part 2: roots of the cubic system. The roots are invariant to a common
    // scaling of (b, A), so the solve runs on a unit-trace form; residual
    // tolerances then do not depend on n or the variance scale.
    const QuadraticForm raw = assemble_quadratic(resp, Z, mu, sigma2);
    const double scale = static_cast<double>(raw.A.rows()) / raw.A.trace();
    const QuadraticForm qf = raw.scaled(scale);

    std::optional<NewtonState> best;
    auto consider = [&](const std::optional<Vector>& init) {
      try {
        NewtonState st = solve_w(qf, cs, init, config.newton, rng);
        if (!best || quadratic_value(st.w, qf) > quadratic_value(best->w, qf)) best = std::move(st);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SolveFailed) throw;
      }
    };
    consider(std::nullopt);
    consider(out.w);
    if (!best) fail(ErrorCode::SolveFailed, "no admissible root for the projection update");

    out.w = best->w;
    out.lambda1 = best->lambda1 / scale;

    const double h = objective_h(Z, out.w, out.params, priors);
    if (std::abs(h - h_prev) < config.eps_m) break;
    h_prev = h;
  }
  return out;
}

PmogFit fit_pmog(const DataMatrix& Z, const ConstraintSet& cs,
                 const std::optional<PriorConfig>& priors_in, const EmConfig& config,
                 const std::optional<Vector>& w0) {
  config.validate();
  require(cs.dims() == Z.dims(), ErrorCode::InvalidArgument,
          "constraint set dimension must match the data");
  require(Z.samples() > config.R, ErrorCode::InvalidArgument, "need more samples than components");

  Rng rng(config.seed);
  Vector w;
  if (w0) {
    require(w0->size() == Z.dims(), ErrorCode::InvalidArgument, "w0 has wrong length");
    w = *w0 / w0->norm();
  } else {
    w = random_constrained_w(cs, rng);
  }

  const Vector u0 = projections(Z, w);
  const PriorConfig priors =
      priors_in ? *priors_in : PriorConfig::defaults(config.R, sample_variance(u0));
  priors.validate(config.R);

  const KMeans1d clusters = kmeans_1d(u0, config.R, config.kmeans, rng);
  PmogFit fit{mog_from_clusters(u0, clusters), w, {}, 0, false, false, 0.0};
  double h = objective_h(Z, fit.w, fit.params, priors);
  fit.objective_trace.push_back(h);
  double abs_sum = std::abs(h);

  for (int t = 0; t < config.max_em_iters; ++t) {
    const Responsibilities resp = e_step(Z, fit.w, fit.params);
    const double bound = expected_log_likelihood_q(Z, fit.w, fit.params, resp) +
                         log_prior_h2(fit.params, priors);

    std::optional<MStepResult> accepted;
    std::optional<MStepResult> best;
    double best_h = -std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= config.max_restarts; ++attempt) {
      if (attempt > 0) ++fit.restarts_used;
      const Vector start = attempt == 0 ? fit.w : random_constrained_w(cs, rng);
      try {
        MStepResult cand = m_step(resp, Z, cs, fit.params, start, priors, config, rng);
        const double q_new = expected_log_likelihood_q(Z, cand.w, cand.params, resp) +
                             log_prior_h2(cand.params, priors);
        const double h_new = objective_h(Z, cand.w, cand.params, priors);
        if (q_new >= bound - kMonotoneSlack && h_new >= h - kMonotoneSlack) {
          accepted = std::move(cand);
          break;
        }
        if (h_new > best_h) {
          best_h = h_new;
          best = std::move(cand);
        }
      } catch (const Error& e) {
        const auto c = e.code();
        if (c != ErrorCode::SolveFailed && c != ErrorCode::EmptyComponent &&
            c != ErrorCode::DegenerateSample && c != ErrorCode::NumericalUnderflow)
          throw;
      }
    }

    if (!accepted) {
      fit.restarts_exhausted = true;
      // The best candidate is kept only if it does not lower the objective.
      if (!best || best_h < h - kMonotoneSlack) break;
      accepted = std::move(best);
    }

    fit.params = accepted->params;
    fit.w = accepted->w;
    fit.lambda1 = accepted->lambda1;
    const double h_new = objective_h(Z, fit.w, fit.params, priors);
    fit.objective_trace.push_back(h_new);
    abs_sum += std::abs(h_new);

    const double eps_star =
        config.eps_rel * abs_sum / static_cast<double>(fit.objective_trace.size());
    const double delta = std::abs(h_new - h);
    h = h_new;
    if (delta <= eps_star) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

}  // namespace pmog
