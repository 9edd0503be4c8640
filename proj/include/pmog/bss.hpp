#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmog/fastica.hpp"
#include "pmog/pmog_em.hpp"
#include "pmog/ppca.hpp"

namespace pmog {

enum class BssMode { Orthogonal, Nonorthogonal, FicaDeflation, FicaSymmetric };

/// CLI spellings: pmog-orth, pmog-nonorth, fica-defl, fica-symm.
std::string_view to_string(BssMode mode);
std::optional<BssMode> parse_bss_mode(std::string_view name);
bool is_fica(BssMode mode);

struct BssConfig {
  BssMode mode = BssMode::Orthogonal;
  EmConfig em;
  std::optional<PriorConfig> priors;
  int restarts_per_source = 3;
  double duplicate_threshold = 0.98;
  int duplicate_retries = 10;
  FicaConfig fica;
};

struct SourceDiagnostics {
  /// NaN for the FastICA modes, which fit no mixture.
  double pmog_entropy = 0.0;
  double hyvarinen_entropy = 0.0;
  std::optional<MogParams> params;
  /// EM restarts used by the selected fit (FastICA: iterations).
  int restarts = 0;
  bool converged = false;
  /// Non-orthogonal mode: re-initialisations needed to avoid a duplicate.
  int reinitializations = 0;
  double objective = 0.0;
};

struct BssResult {
  Matrix W;       // extracted rows only; fewer than q when incomplete
  Matrix S_hat;   // W z
  BssMode mode = BssMode::Orthogonal;
  std::vector<SourceDiagnostics> per_source;
  double correlation_penalty = 0.0;
  bool complete = true;
  std::optional<Eigen::Index> failed_source;
  std::string failure;

  bool orthonormal(double tol = 1e-6) const;
};

/// True iff max_j |w_new . W_prev.row(j)| > threshold.
bool duplicate_check(const Vector& w_new, const Matrix& W_prev, double threshold);

/// Extracts q sources from whitened data, sequentially for the PMOG modes.
/// An extraction that exhausts its budget returns the rows found so far with
/// complete = false and failed_source set.
BssResult extract_sources(const DataMatrix& Z, Eigen::Index q, const BssConfig& config, Rng& rng);

struct Separation {
  PpcaFit ppca;
  BssResult bss;
  /// Recovered sources in observation order: S_hat = W z.
  const Matrix& sources() const noexcept { return bss.S_hat; }
  /// q x p map from centred observations to sources, W times the whitener.
  Matrix unmixing() const { return bss.W * ppca.whitener; }
};

/// PPCA whitening followed by extract_sources. The FastICA modes whiten with
/// the noise term dropped so that z has identity covariance.
Separation separate(const Matrix& X, Eigen::Index q, const BssConfig& config, Rng& rng);

}  // namespace pmog
