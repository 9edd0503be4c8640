#include "pmog/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmog/bss.hpp"
#include "pmog/eval_stats.hpp"
#include "pmog/io.hpp"
#include "pmog/ppca.hpp"

namespace pmog::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void usage(const std::string& what) { fail(ErrorCode::UsageError, what); }

std::string run_dir_name(Eigen::Index k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%03ld", static_cast<long>(k));
  return buf;
}

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// Non-finite diagnostics serialise as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json config_echo(const RunConfig& c) {
  return json{{"q", c.q},
              {"p", c.p},
              {"n", c.n},
              {"m_runs", c.m_runs},
              {"R", c.R},
              {"mode", c.mode},
              {"seed", c.seed},
              {"eps_rel", c.eps_rel},
              {"eps_m", c.eps_m},
              {"max_restarts", c.max_restarts},
              {"restarts_per_source", c.restarts_per_source},
              {"duplicate_threshold", c.duplicate_threshold},
              {"mixing", c.mixing},
              {"source_dist_ranges",
               {{"pi", range_json(c.ranges.pi)},
                {"mu", range_json(c.ranges.mu)},
                {"sigma2", range_json(c.ranges.sigma2)}}}};
}

void write_json(const fs::path& path, const json& doc) { io::write_text(path, doc.dump(2) + "\n"); }

json document_header(const RunConfig& c, const char* command) {
  return json{{"schema_version", kSchemaVersion},
              {"version", kVersion},
              {"command", command},
              {"seed", c.seed},
              {"config", config_echo(c)}};
}

void validate_common(const RunConfig& c) {
  if (c.R < 1) usage("--R must be at least 1");
  if (c.q < 1) usage("--q must be at least 1");
  if (!(c.eps_rel > 0) || !(c.eps_m > 0)) usage("tolerances must be positive");
  if (c.max_restarts < 0) usage("--max-restarts must be non-negative");
  if (c.restarts_per_source < 1) usage("--restarts-per-source must be at least 1");
  if (!(c.duplicate_threshold > 0 && c.duplicate_threshold <= 1))
    usage("--duplicate-threshold must lie in (0, 1]");
}

BssConfig bss_config(const RunConfig& c, BssMode mode) {
  BssConfig b;
  b.mode = mode;
  b.em.R = c.R;
  b.em.eps_rel = c.eps_rel;
  b.em.eps_m = c.eps_m;
  b.em.max_restarts = c.max_restarts;
  b.em.seed = c.seed;
  b.restarts_per_source = c.restarts_per_source;
  b.duplicate_threshold = c.duplicate_threshold;
  return b;
}

json source_json(const SourceDiagnostics& d) {
  json s{{"pmog_entropy", number_or_null(d.pmog_entropy)},
         {"hyvarinen_entropy", number_or_null(d.hyvarinen_entropy)},
         {"restarts", d.restarts},
         {"converged", d.converged},
         {"reinitializations", d.reinitializations}};
  if (d.params) {
    s["objective"] = number_or_null(d.objective);
    s["params"] = {{"pi", vector_json(d.params->pi())},
                   {"mu", vector_json(d.params->mu())},
                   {"sigma2", vector_json(d.params->sigma2())}};
  } else {
    s["objective"] = nullptr;
    s["params"] = nullptr;
  }
  return s;
}

json bss_json(const BssResult& r) {
  json sources = json::array();
  for (std::size_t i = 0; i < r.per_source.size(); ++i) {
    json s = source_json(r.per_source[i]);
    s["index"] = i;
    sources.push_back(std::move(s));
  }
  return json{{"mode", std::string(to_string(r.mode))},
              {"sources", std::move(sources)},
              {"correlation_penalty", number_or_null(r.correlation_penalty)},
              {"orthonormal", r.orthonormal()},
              {"complete", r.complete},
              {"failed_source", r.failed_source ? json(*r.failed_source) : json(nullptr)},
              {"failure", r.complete ? json(nullptr) : json(r.failure)}};
}

BssMode mode_or_usage(const std::string& name) {
  const auto mode = parse_bss_mode(name);
  if (!mode) usage("unknown mode '" + name + "'");
  return *mode;
}

// Row-standardised copy (zero mean, unit 1/n variance).
Matrix standardize_rows(const Matrix& M) {
  Matrix out = M.colwise() - M.rowwise().mean();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double sd = std::sqrt(out.row(r).squaredNorm() / static_cast<double>(out.cols()));
    if (!(sd > 0)) {
      std::ostringstream os;
      os << "row " << r << " is constant";
      fail(ErrorCode::ConstantRow, os.str());
    }
    out.row(r) /= sd;
  }
  return out;
}

// For display only: flip each recovered row to correlate positively with its
// best-matching reference row.
Matrix orient_like(const Matrix& S_hat, const Matrix& reference) {
  Matrix out = S_hat;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < reference.rows(); ++j) {
      const double c = correlation(out.row(r).transpose(), reference.row(j).transpose());
      if (std::abs(c) > std::abs(best)) best = c;
    }
    if (best < 0) out.row(r) *= -1.0;
  }
  return out;
}

}  // namespace

void cmd_generate(const RunConfig& c) {
  validate_common(c);
  if (c.n < 2) usage("--n must be at least 2");
  if (c.p < c.q) usage("--p must be at least --q");
  if (c.m_runs < 1) usage("--m must be at least 1");

  Rng source_rng = make_stream(c.seed, 0);
  const Matrix S = generate_mog_sources(c.q, c.R, c.n, c.ranges, source_rng);
  const Matrix S_white = empirical_whiten(S);
  io::write_csv(c.out / "sources.csv", S_white);

  json runs = json::array();
  for (Eigen::Index k = 0; k < c.m_runs; ++k) {
    Rng rng = make_stream(c.seed, static_cast<std::uint64_t>(k) + 1);
    const Matrix A = uniform_mixing(c.p, c.q, rng);
    const fs::path dir = c.out / run_dir_name(k);
    io::write_csv(dir / "mixing.csv", A);
    io::write_csv(dir / "mixed.csv", A * S_white);
    runs.push_back({{"run", k},
                    {"mixed", (fs::path(run_dir_name(k)) / "mixed.csv").generic_string()},
                    {"mixing", (fs::path(run_dir_name(k)) / "mixing.csv").generic_string()}});
  }
  json meta = document_header(c, "generate");
  meta["sources"] = "sources.csv";
  meta["runs"] = std::move(runs);
  write_json(c.out / "meta.json", meta);
  std::cout << "wrote " << c.m_runs << " mixtures of " << c.q << " sources to " << c.out.string()
            << "\n";
}

int cmd_extract(const RunConfig& c) {
  validate_common(c);
  const BssMode mode = mode_or_usage(c.mode);
  if (c.input.empty()) usage("extract needs --input");
  const Matrix X = io::read_csv(c.input);
  if (c.q > X.rows()) {
    std::ostringstream os;
    os << "--q " << c.q << " exceeds the observed dimension " << X.rows();
    usage(os.str());
  }

  const auto start = std::chrono::steady_clock::now();
  Rng rng(c.seed);
  const Separation sep = separate(X, c.q, bss_config(c, mode), rng);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  io::write_csv(c.out / "sources_hat.csv", sep.sources());
  io::write_csv(c.out / "unmixing.csv", sep.unmixing());
  json report = document_header(c, "extract");
  report["input"] = c.input.generic_string();
  report["observed_dims"] = X.rows();
  report["samples"] = X.cols();
  report["sigma2_hat"] = sep.ppca.sigma2_hat;
  report.update(bss_json(sep.bss));
  if (c.timing) report["wall_time_s"] = elapsed;
  write_json(c.out / "report.json", report);

  if (!sep.bss.complete) {
    std::cerr << "pmog-bss: " << to_string(ErrorCode::ExtractionFailed) << ": " << sep.bss.failure
              << "\n";
    return kExitRuntime;
  }
  std::cout << "extracted " << sep.bss.W.rows() << " sources (" << c.mode << ") to "
            << c.out.string() << "\n";
  return kExitOk;
}

void cmd_evaluate(const RunConfig& c) {
  if (c.truth.empty()) usage("evaluate needs --truth");
  if (c.pairs.size() < 2) usage("evaluate needs at least two --pair runs");
  if (c.label_a == c.label_b) usage("the two method labels must differ");
  const Matrix truth = io::read_csv(c.truth);

  const auto m = static_cast<Eigen::Index>(c.pairs.size());
  Vector match_a(m), match_b(m);
  json per_run = json::array();
  const std::string key_a = "match_" + c.label_a;
  const std::string key_b = "match_" + c.label_b;

  auto load = [&](const fs::path& path) {
    Matrix est = io::read_csv(path);
    if (est.cols() != truth.cols()) {
      std::ostringstream os;
      os << path.string() << " has " << est.cols() << " samples, the truth has " << truth.cols();
      fail(ErrorCode::ShapeMismatch, os.str());
    }
    return est;
  };
  // Diagnostics from an extract report next to the estimate, when present.
  auto sidecar = [](const fs::path& estimate, const std::string& label, json& run) {
    const fs::path report = estimate.parent_path() / "report.json";
    if (!fs::exists(report)) return;
    json doc;
    try {
      doc = json::parse(io::read_text(report));
    } catch (const json::exception& e) {
      fail(ErrorCode::IoError, report.string() + ": " + e.what());
    }
    json entropies = json::array();
    json restarts = json::array();
    for (const auto& s : doc.value("sources", json::array())) {
      entropies.push_back(s.value("pmog_entropy", json(nullptr)));
      restarts.push_back(s.value("restarts", json(nullptr)));
    }
    run["entropies_" + label] = std::move(entropies);
    run["restarts_" + label] = std::move(restarts);
    run["correlation_penalty_" + label] = doc.value("correlation_penalty", json(nullptr));
    if (doc.contains("wall_time_s")) run["wall_time_s_" + label] = doc["wall_time_s"];
  };

  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& [path_a, path_b] = c.pairs[static_cast<std::size_t>(k)];
    match_a(k) = match_score(truth, load(path_a));
    match_b(k) = match_score(truth, load(path_b));
    json run{{"run", k}, {key_a, match_a(k)}, {key_b, match_b(k)}};
    sidecar(path_a, c.label_a, run);
    sidecar(path_b, c.label_b, run);
    per_run.push_back(std::move(run));
  }

  json aggregate{{"mean_" + c.label_a, match_a.mean()}, {"mean_" + c.label_b, match_b.mean()}};
  if (m < 3) {
    aggregate["t_stat"] = nullptr;
    aggregate["dof"] = nullptr;
    aggregate["p_value"] = nullptr;
    aggregate["status"] = "skipped: fewer than 3 runs";
  } else try {
    const MatchReport rep = compare_match(match_a, match_b);
    aggregate["t_stat"] = rep.t_stat;
    aggregate["dof"] = rep.dof;
    aggregate["p_value"] = rep.p_value;
    aggregate["status"] = "ok";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
    const bool identical = match_a == match_b;
    aggregate["t_stat"] = identical ? json(0.0) : json(nullptr);
    aggregate["dof"] = nullptr;
    aggregate["p_value"] = identical ? json(1.0) : json(nullptr);
    aggregate["status"] = identical ? "degenerate: identical" : "degenerate: zero variance";
  }
  const double diff = match_b.mean() - match_a.mean();
  aggregate["direction"] = diff > 0   ? c.label_b + " > " + c.label_a
                           : diff < 0 ? c.label_a + " > " + c.label_b
                                      : "equal";

  json doc = document_header(c, "evaluate");
  doc["truth"] = c.truth.generic_string();
  doc["labels"] = {c.label_a, c.label_b};
  doc["per_run"] = std::move(per_run);
  doc["aggregate"] = aggregate;
  write_json(c.out / "comparison.json", doc);

  std::ostringstream dat;
  dat << "# run " << key_a << " run " << key_b << "\n";
  for (Eigen::Index k = 0; k < m; ++k)
    dat << k << ' ' << io::format_double(match_a(k)) << ' ' << k << ' '
        << io::format_double(match_b(k)) << "\n";
  io::write_text(c.out / "match_curves.dat", dat.str());

  std::cout << aggregate["direction"].get<std::string>() << " (mean " << key_a << " "
            << match_a.mean() << ", mean " << key_b << " " << match_b.mean() << ", "
            << aggregate["status"].get<std::string>() << ")\n";
}

void cmd_demo_images(const RunConfig& c) {
  validate_common(c);
  if (c.images.size() != 3) usage("demo-images needs exactly three --images");
  if (c.mixing != "random" && c.mixing != "identity") usage("--mixing must be random or identity");

  std::vector<io::GrayImage> imgs;
  for (const auto& path : c.images) imgs.push_back(io::read_pgm(path));
  const int width = imgs[0].width;
  const int height = imgs[0].height;
  for (std::size_t k = 1; k < imgs.size(); ++k) {
    if (imgs[k].width != width || imgs[k].height != height) {
      std::ostringstream os;
      os << c.images[k].string() << " is " << imgs[k].width << "x" << imgs[k].height << ", expected "
         << width << "x" << height;
      fail(ErrorCode::SizeMismatch, os.str());
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(width) * height;
  Matrix S(3, n);
  for (Eigen::Index k = 0; k < 3; ++k)
    S.row(k) = Eigen::Map<const Vector>(imgs[static_cast<std::size_t>(k)].pixels.data(), n).transpose();
  S = standardize_rows(S);

  Rng rng = make_stream(c.seed, 0);
  const Matrix A = c.mixing == "identity" ? Matrix::Identity(3, 3) : gaussian_matrix(3, 3, rng);
  const Matrix offset = gaussian_matrix(3, 1, rng);
  const Matrix X = (A * S).colwise() + offset.col(0);
  for (Eigen::Index k = 0; k < 3; ++k)
    io::write_pgm_rescaled(c.out / ("mixed_" + std::to_string(k + 1) + ".pgm"),
                           X.row(k).transpose(), width, height);

  json table = json::array();
  std::ostringstream text;
  text << "method\tmatch\n";
  auto record = [&](const std::string& name, double match, json extra) {
    extra["method"] = name;
    extra["match"] = match;
    table.push_back(std::move(extra));
    text << name << '\t' << io::format_double(match) << '\n';
  };
  record("mixed", match_score(S, X), json::object());

  struct Analysis {
    std::string name;
    std::string file_stem;
    BssMode mode;
  };
  const std::vector<Analysis> analyses{{"fica", "fica", BssMode::FicaDeflation},
                                       {"pmog-orth", "pmog_orth", BssMode::Orthogonal},
                                       {"pmog-nonorth", "pmog_nonorth", BssMode::Nonorthogonal}};
  for (std::size_t a = 0; a < analyses.size(); ++a) {
    const Analysis& an = analyses[a];
    Rng run_rng = make_stream(c.seed, a + 1);
    Separation sep = separate(X, 3, bss_config(c, an.mode), run_rng);
    json extra{{"mode", std::string(to_string(sep.bss.mode))}, {"complete", sep.bss.complete}};
    if (an.mode == BssMode::FicaDeflation) {
      bool converged = true;
      for (const auto& s : sep.bss.per_source) converged = converged && s.converged;
      extra["deflation_converged"] = converged;
      if (!converged) {
        // Deflation can stall on these mixtures; the symmetric scheme is the fallback.
        Rng symm_rng = make_stream(c.seed, a + 1);
        sep = separate(X, 3, bss_config(c, BssMode::FicaSymmetric), symm_rng);
        extra["mode"] = std::string(to_string(sep.bss.mode));
      }
    }
    if (!sep.bss.complete) {
      extra["failure"] = sep.bss.failure;
      record(an.name, std::numeric_limits<double>::quiet_NaN(), std::move(extra));
      table.back()["match"] = nullptr;
      continue;
    }
    const Matrix shown = orient_like(sep.sources(), S);
    for (Eigen::Index k = 0; k < shown.rows(); ++k)
      io::write_pgm_rescaled(c.out / (an.file_stem + "_" + std::to_string(k + 1) + ".pgm"),
                             shown.row(k).transpose(), width, height);
    extra["correlation_penalty"] = number_or_null(sep.bss.correlation_penalty);
    record(an.name, match_score(S, sep.sources()), std::move(extra));
  }

  json doc = document_header(c, "demo-images");
  json names = json::array();
  for (const auto& p : c.images) names.push_back(p.generic_string());
  doc["images"] = std::move(names);
  doc["width"] = width;
  doc["height"] = height;
  doc["matches"] = std::move(table);
  write_json(c.out / "demo_report.json", doc);
  io::write_text(c.out / "match_table.txt", text.str());
  std::cout << text.str();
}

namespace {

struct Options {
  std::map<std::string, std::vector<CLI::Option*>> by_key;
  void add(const std::string& key, CLI::Option* opt) { by_key[key].push_back(opt); }
  bool set(const std::string& key) const {
    const auto it = by_key.find(key);
    if (it == by_key.end()) return false;
    for (const CLI::Option* o : it->second)
      if (o->count() > 0) return true;
    return false;
  }
};

template <class T>
T json_get(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    usage("config key '" + key + "' has the wrong type");
  }
}

Range range_from(const json& j, const std::string& key) {
  const auto v = json_get<std::vector<double>>(j, key);
  if (v.size() != 2) usage("config key '" + key + "' must be a [lo, hi] pair");
  return {v[0], v[1]};
}

std::pair<fs::path, fs::path> split_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == s.size())
    usage("--pair expects A.csv,B.csv, got '" + s + "'");
  return {s.substr(0, comma), s.substr(comma + 1)};
}

void apply_config_file(const fs::path& path, RunConfig& c, const Options& opts,
                       bool& seed_given) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::exception& e) {
    usage(path.string() + ": " + e.what());
  }
  if (!j.is_object()) usage(path.string() + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (opts.set(key)) continue;
    if (key == "q") c.q = json_get<Eigen::Index>(value, key);
    else if (key == "p") c.p = json_get<Eigen::Index>(value, key);
    else if (key == "n") c.n = json_get<Eigen::Index>(value, key);
    else if (key == "m_runs") c.m_runs = json_get<Eigen::Index>(value, key);
    else if (key == "R") c.R = json_get<Eigen::Index>(value, key);
    else if (key == "mode") c.mode = json_get<std::string>(value, key);
    else if (key == "seed") { c.seed = json_get<std::uint64_t>(value, key); seed_given = true; }
    else if (key == "eps_rel") c.eps_rel = json_get<double>(value, key);
    else if (key == "eps_m") c.eps_m = json_get<double>(value, key);
    else if (key == "max_restarts") c.max_restarts = json_get<int>(value, key);
    else if (key == "restarts_per_source") c.restarts_per_source = json_get<int>(value, key);
    else if (key == "duplicate_threshold") c.duplicate_threshold = json_get<double>(value, key);
    else if (key == "mixing") c.mixing = json_get<std::string>(value, key);
    else if (key == "input") c.input = json_get<std::string>(value, key);
    else if (key == "truth") c.truth = json_get<std::string>(value, key);
    else if (key == "out") c.out = json_get<std::string>(value, key);
    else if (key == "images") {
      c.images.clear();
      for (const auto& s : json_get<std::vector<std::string>>(value, key)) c.images.emplace_back(s);
    } else if (key == "pairs") {
      c.pairs.clear();
      for (const auto& s : json_get<std::vector<std::string>>(value, key)) c.pairs.push_back(split_pair(s));
    } else if (key == "labels") {
      const auto v = json_get<std::vector<std::string>>(value, key);
      if (v.size() != 2) usage("config key 'labels' must hold two names");
      c.label_a = v[0];
      c.label_b = v[1];
    } else if (key == "source_dist_ranges") {
      if (!value.is_object()) usage("config key 'source_dist_ranges' must be an object");
      for (const auto& [rk, rv] : value.items()) {
        if (opts.set("range_" + rk)) continue;
        if (rk == "pi") c.ranges.pi = range_from(rv, rk);
        else if (rk == "mu") c.ranges.mu = range_from(rv, rk);
        else if (rk == "sigma2") c.ranges.sigma2 = range_from(rv, rk);
        else usage("unknown source_dist_ranges key '" + rk + "'");
      }
    } else {
      usage(path.string() + ": unknown config key '" + key + "'");
    }
  }
}

std::uint64_t seed_from_env() {
  const char* env = std::getenv("PMOG_SEED");
  if (!env || !*env) return 42;
  std::uint64_t v = 0;
  const std::string_view s(env);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    usage(std::string("PMOG_SEED is not an unsigned integer: ") + env);
  return v;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Blind source separation with projected mixtures of Gaussians", "pmog-bss"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunConfig c;
  std::string config_path;
  std::vector<double> pi_range, mu_range, s2_range;
  std::vector<std::string> pair_specs, image_specs;
  std::string out_dir = c.out.string(), input, truth;
  Options opts;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; explicit flags take precedence");
    opts.add("seed", sub->add_option("--seed", c.seed, "RNG seed (fallback: $PMOG_SEED, then 42)"));
    opts.add("out", sub->add_option("--out", out_dir, "output directory")->capture_default_str());
  };
  auto model = [&](CLI::App* sub) {
    opts.add("R", sub->add_option("--R", c.R, "mixture components per source")->capture_default_str());
    opts.add("eps_rel", sub->add_option("--eps-rel", c.eps_rel, "relative EM tolerance")->capture_default_str());
    opts.add("eps_m", sub->add_option("--eps-m", c.eps_m, "M-step alternation tolerance")->capture_default_str());
    opts.add("max_restarts", sub->add_option("--max-restarts", c.max_restarts, "M-step restarts per EM iteration")->capture_default_str());
    opts.add("restarts_per_source", sub->add_option("--restarts-per-source", c.restarts_per_source,
                                                         "independent fits per source, best kept")
                                             ->capture_default_str());
    opts.add("duplicate_threshold", sub->add_option("--duplicate-threshold", c.duplicate_threshold,
                        "non-orthogonal mode: |cosine| above which a direction is a duplicate")
            ->capture_default_str());
  };

  CLI::App* gen = app.add_subcommand("generate", "draw MOG sources, whiten them, and write m random mixtures");
  common(gen);
  opts.add("q", gen->add_option("--q", c.q, "number of sources")->capture_default_str());
  opts.add("p", gen->add_option("--p", c.p, "observed dimension")->capture_default_str());
  opts.add("n", gen->add_option("--n", c.n, "samples per source")->capture_default_str());
  opts.add("m_runs", gen->add_option("--m", c.m_runs, "number of mixing matrices")->capture_default_str());
  opts.add("R", gen->add_option("--R", c.R, "mixture components per source")->capture_default_str());
  opts.add("range_pi", gen->add_option("--pi-range", pi_range, "U(lo,hi) for fractions before normalising [0,1]")->expected(2)->delimiter(','));
  opts.add("range_mu", gen->add_option("--mu-range", mu_range, "U(lo,hi) for component means [-10,10]")->expected(2)->delimiter(','));
  opts.add("range_sigma2", gen->add_option("--sigma2-range", s2_range, "U(lo,hi) for component variances [1,5]")->expected(2)->delimiter(','));

  CLI::App* ext = app.add_subcommand("extract", "whiten a mixture and recover its sources");
  common(ext);
  model(ext);
  opts.add("input", ext->add_option("--input", input, "p x n mixture CSV"));
  opts.add("q", ext->add_option("--q", c.q, "number of sources to extract")->capture_default_str());
  opts.add("mode", ext->add_option("--mode", c.mode, "pmog-orth | pmog-nonorth | fica-defl | fica-symm")
                            ->capture_default_str());
  ext->add_flag("--timing", c.timing, "record wall_time_s in report.json (breaks byte-identical reruns)");

  CLI::App* ev = app.add_subcommand("evaluate", "compare two methods' Match against the true sources");
  common(ev);
  opts.add("truth", ev->add_option("--truth", truth, "q x n true sources CSV"));
  opts.add("pairs", ev->add_option("--pair", pair_specs, "A.csv,B.csv estimates of one run (repeat per run)"));
  opts.add("labels", ev->add_option("--label-a", c.label_a, "name of the first method")->capture_default_str());
  opts.add("labels", ev->add_option("--label-b", c.label_b, "name of the second method")->capture_default_str());

  CLI::App* demo = app.add_subcommand("demo-images", "mix three PGM images and unmix them with each method");
  common(demo);
  model(demo);
  opts.add("images", demo->add_option("--images", image_specs, "three same-size PGM images"));
  opts.add("mixing", demo->add_option("--mixing", c.mixing, "random | identity")->capture_default_str());

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    bool seed_given = opts.set("seed");
    if (!config_path.empty()) apply_config_file(config_path, c, opts, seed_given);
    if (!seed_given) c.seed = seed_from_env();
    if (opts.set("out")) c.out = out_dir;
    if (opts.set("input")) c.input = input;
    if (opts.set("truth")) c.truth = truth;
    if (opts.set("images")) {
      c.images.clear();
      for (const auto& s : image_specs) c.images.emplace_back(s);
    }
    if (opts.set("pairs")) {
      c.pairs.clear();
      for (const auto& s : pair_specs) c.pairs.push_back(split_pair(s));
    }
    if (opts.set("range_pi")) c.ranges.pi = {pi_range[0], pi_range[1]};
    if (opts.set("range_mu")) c.ranges.mu = {mu_range[0], mu_range[1]};
    if (opts.set("range_sigma2")) c.ranges.sigma2 = {s2_range[0], s2_range[1]};

    if (gen->parsed()) {
      cmd_generate(c);
      return kExitOk;
    }
    if (ext->parsed()) return cmd_extract(c);
    if (ev->parsed()) {
      cmd_evaluate(c);
      return kExitOk;
    }
    cmd_demo_images(c);
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "pmog-bss: " << e.what() << "\n";
    return e.code() == ErrorCode::UsageError ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "pmog-bss: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace pmog::cli
