#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pmog/kmeans.hpp"
#include "pmog/mog.hpp"
#include "pmog/quadratic_form.hpp"

namespace pmog {

struct NewtonConfig {
  double eta0 = 1e-3;
  double eta_grow = 10.0;
  double eta_shrink = 0.1;
  int max_iters = 200;
  int max_damping_retries = 8;
  double residual_tol = 1e-9;
};

struct EmConfig {
  Eigen::Index R = 5;
  double eps_rel = 1e-5;
  double eps_m = 1e-3;
  int max_em_iters = 500;
  int max_restarts = 20;
  int max_m_alternations = 100;
  NewtonConfig newton;
  KMeansConfig kmeans;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Outcome of a Levenberg-Marquardt solve of the cubic stationarity system.
struct NewtonState {
  Vector w;
  Vector residual;
  double eta = 0.0;
  /// Multiplier of the unit-norm constraint, (w^T b - w^T A w) / 2.
  double lambda1 = 0.0;
  int iterations = 0;
};

struct PmogFit {
  MogParams params;
  Vector w;
  std::vector<double> objective_trace;
  int restarts_used = 0;
  bool converged = false;
  bool restarts_exhausted = false;
  /// lambda1 of the last accepted projection update (unscaled).
  double lambda1 = 0.0;

  double objective() const { return objective_trace.back(); }
};

// M-step part 1 closed forms.
Vector update_pi(const Responsibilities& resp, const Vector& beta);
Vector update_mu(const Responsibilities& resp, const DataMatrix& Z, const Vector& w);
Vector update_sigma2(const Responsibilities& resp, const DataMatrix& Z, const Vector& w,
                     const Vector& mu, const PriorConfig& priors);

/// Same updates on precomputed projections u = Z^T w.
Vector update_mu(const Responsibilities& resp, const Vector& u);
Vector update_sigma2(const Responsibilities& resp, const Vector& u, const Vector& mu,
                     const PriorConfig& priors);

QuadraticForm assemble_quadratic(const Responsibilities& resp, const DataMatrix& Z,
                                 const Vector& mu, const Vector& sigma2);

/// f(w) = P_G (b - A w) - (w^T b - w^T A w) w
Vector cubic_residual(const Vector& w, const QuadraticForm& qf, const ConstraintSet& cs);
Matrix cubic_jacobian(const Vector& w, const QuadraticForm& qf, const ConstraintSet& cs);

/// Q(w) up to a w-independent constant: b^T w - w^T A w / 2.
double quadratic_value(const Vector& w, const QuadraticForm& qf);

/// P_G A^{-1} b normalised; empty when A is singular or the projection vanishes.
std::optional<Vector> newton_init(const QuadraticForm& qf, const ConstraintSet& cs);

/// Uniform draw on the unit sphere intersected with the null space of G^T.
Vector random_constrained_w(const ConstraintSet& cs, Rng& rng);

/// Root of the cubic system by damped Newton. Without `w_init` the solve starts
/// from newton_init (random constrained if A is singular). Throws SolveFailed on
/// non-convergence or on roots with |w^T b - w^T A w| < 1e-12.
NewtonState solve_w(const QuadraticForm& qf, const ConstraintSet& cs,
                    const std::optional<Vector>& w_init, const NewtonConfig& config, Rng& rng);

struct MStepResult {
  MogParams params;
  Vector w;
  double lambda1 = 0.0;
  int alternations = 0;
};

/// Alternates the closed-form part 1 with the projection solve of part 2 at
/// fixed responsibilities until the objective moves by less than eps_m.
MStepResult m_step(const Responsibilities& resp, const DataMatrix& Z, const ConstraintSet& cs,
                   const MogParams& params, const Vector& w, const PriorConfig& priors,
                   const EmConfig& config, Rng& rng);

/// Full EM estimator. `priors` defaults to PriorConfig::defaults on the initial
/// projection; `w0` overrides the random constrained starting projection.
PmogFit fit_pmog(const DataMatrix& Z, const ConstraintSet& cs,
                 const std::optional<PriorConfig>& priors, const EmConfig& config,
                 const std::optional<Vector>& w0 = std::nullopt);

/// Variance used as the collapse floor reference: sample variance of u.
double sample_variance(const Vector& u);

}  // namespace pmog
