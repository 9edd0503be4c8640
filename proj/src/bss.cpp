#include "pmog/bss.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "pmog/entropy.hpp"
#include "pmog/kernels.hpp"

namespace pmog {

namespace {

constexpr std::array<std::pair<BssMode, std::string_view>, 4> kModeNames{{
    {BssMode::Orthogonal, "pmog-orth"},
    {BssMode::Nonorthogonal, "pmog-nonorth"},
    {BssMode::FicaDeflation, "fica-defl"},
    {BssMode::FicaSymmetric, "fica-symm"},
}};

struct Attempt {
  std::optional<PmogFit> fit;
  std::string error;
};

void fill_entropies(SourceDiagnostics& diag, const Vector& u) {
  const Vector centered = u.array() - u.mean();
  const double var = sample_variance(u);
  diag.hyvarinen_entropy = var > 0 ? hyvarinen_entropy(centered, var)
                                   : -std::numeric_limits<double>::infinity();
}

void finish(BssResult& out, const DataMatrix& Z) {
  out.S_hat = out.W * Z.values();
  out.correlation_penalty = std::numeric_limits<double>::quiet_NaN();
  if (out.W.rows() == 0) return;
  try {
    out.correlation_penalty = correlation_penalty(out.S_hat);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularCorrelation && e.code() != ErrorCode::ConstantRow) throw;
    out.correlation_penalty = std::numeric_limits<double>::infinity();
  }
}

BssResult extract_fica(const DataMatrix& Z, Eigen::Index q, const BssConfig& config, Rng& rng) {
  const FicaMode mode =
      config.mode == BssMode::FicaDeflation ? FicaMode::Deflation : FicaMode::Symmetric;
  const FicaResult fica = fica_extract(Z, q, mode, rng, config.fica);
  BssResult out;
  out.mode = config.mode;
  out.W = fica.W;
  for (Eigen::Index m = 0; m < q; ++m) {
    SourceDiagnostics diag;
    diag.pmog_entropy = std::numeric_limits<double>::quiet_NaN();
    diag.converged = fica.converged[static_cast<std::size_t>(m)];
    diag.restarts = fica.iterations[static_cast<std::size_t>(m)];
    fill_entropies(diag, Z.values().transpose() * fica.W.row(m).transpose());
    out.per_source.push_back(std::move(diag));
  }
  finish(out, Z);
  return out;
}

}  // namespace

std::string_view to_string(BssMode mode) {
  for (const auto& [m, name] : kModeNames)
    if (m == mode) return name;
  return "unknown";
}

std::optional<BssMode> parse_bss_mode(std::string_view name) {
  for (const auto& [m, n] : kModeNames)
    if (n == name) return m;
  return std::nullopt;
}

bool is_fica(BssMode mode) {
  return mode == BssMode::FicaDeflation || mode == BssMode::FicaSymmetric;
}

bool BssResult::orthonormal(double tol) const {
  if (W.rows() == 0) return true;
  const Matrix gram = W * W.transpose();
  return (gram - Matrix::Identity(W.rows(), W.rows())).cwiseAbs().maxCoeff() <= tol;
}

bool duplicate_check(const Vector& w_new, const Matrix& W_prev, double threshold) {
  if (W_prev.rows() == 0) return false;
  require(W_prev.cols() == w_new.size(), ErrorCode::InvalidArgument,
          "previous rows have the wrong length");
  return (W_prev * w_new).cwiseAbs().maxCoeff() > threshold;
}

BssResult extract_sources(const DataMatrix& Z, Eigen::Index q, const BssConfig& config, Rng& rng) {
  const Eigen::Index d = Z.dims();
  require(q >= 1 && q <= d, ErrorCode::InvalidArgument, "need 1 <= q <= dims");
  require(config.restarts_per_source >= 1 && config.duplicate_retries >= 0,
          ErrorCode::InvalidArgument, "restart budgets must be non-negative");
  if (is_fica(config.mode)) return extract_fica(Z, q, config, rng);
  config.em.validate();

  const bool orthogonal = config.mode == BssMode::Orthogonal;
  const int restarts = config.restarts_per_source;
  const int reinit_budget = orthogonal ? 0 : config.duplicate_retries;

  BssResult out;
  out.mode = config.mode;
  out.W = Matrix(0, d);

  for (Eigen::Index m = 0; m < q; ++m) {
    const Matrix previous = out.W.transpose();
    const ConstraintSet init_cs = m == 0 ? ConstraintSet(d) : ConstraintSet(previous);
    const ConstraintSet fit_cs = orthogonal ? init_cs : ConstraintSet(d);

    std::optional<PmogFit> chosen;
    int reinit = 0;
    std::string last_error;
    for (; reinit <= reinit_budget && !chosen; ++reinit) {
      // Seeds and starting projections are drawn serially so the concurrent
      // fits below see the same inputs regardless of scheduling.
      std::vector<EmConfig> configs(static_cast<std::size_t>(restarts), config.em);
      std::vector<Vector> starts;
      for (int r = 0; r < restarts; ++r) {
        configs[static_cast<std::size_t>(r)].seed = rng();
        starts.push_back(random_constrained_w(init_cs, rng));
      }
      std::vector<Attempt> attempts(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(static)
      for (int r = 0; r < restarts; ++r) {
        const auto idx = static_cast<std::size_t>(r);
        try {
          attempts[idx].fit = fit_pmog(Z, fit_cs, config.priors, configs[idx], starts[idx]);
        } catch (const std::exception& e) {
          attempts[idx].error = e.what();
        }
      }
      for (auto& a : attempts) {
        if (!a.fit) {
          last_error = a.error;
          continue;
        }
        if (!orthogonal && duplicate_check(a.fit->w, out.W, config.duplicate_threshold)) {
          last_error = "converged to a previously extracted direction";
          continue;
        }
        if (!chosen || a.fit->objective() > chosen->objective()) chosen = std::move(a.fit);
      }
    }

    if (!chosen) {
      out.complete = false;
      out.failed_source = m;
      std::ostringstream os;
      os << "source " << m << " could not be extracted: " << last_error;
      out.failure = os.str();
      break;
    }

    SourceDiagnostics diag;
    diag.params = chosen->params;
    diag.restarts = chosen->restarts_used;
    diag.converged = chosen->converged;
    diag.reinitializations = reinit - 1;
    diag.objective = chosen->objective();
    Vector u;
    kernels::parallel::project(Z.values(), chosen->w, u);
    diag.pmog_entropy = pmog_entropy(u, chosen->params);
    fill_entropies(diag, u);
    out.per_source.push_back(std::move(diag));

    out.W.conservativeResize(m + 1, d);
    out.W.row(m) = chosen->w.transpose();
  }

  finish(out, Z);
  return out;
}

Separation separate(const Matrix& X, Eigen::Index q, const BssConfig& config, Rng& rng) {
  const NoiseModel noise = is_fica(config.mode) ? NoiseModel::Ignore : NoiseModel::Estimate;
  Separation out{ppca_fit(X, q, noise), {}};
  out.bss = extract_sources(whiten(X, out.ppca), q, config, rng);
  return out;
}

}  // namespace pmog
