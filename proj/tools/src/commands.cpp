#include "commands.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>

#include <CLI11.hpp>

#include "input.hpp"
#include "json_io.hpp"
#include "report.hpp"
#include "rankverify/error.hpp"
#include "rankverify/sampling.hpp"
#include "rankverify/selection.hpp"

namespace rankverify::cli {

namespace {

struct InputFlags {
  std::string input;
  std::string covariance_csv;
  int k = 1;
  std::string ties = "error";
  std::string format = "json";
};

void add_input_flags(CLI::App* cmd, InputFlags& f) {
  cmd->add_option("--input", f.input, "JSON input document, or observations CSV")->required();
  cmd->add_option("--covariance", f.covariance_csv, "Covariance CSV (with a CSV --input)");
  cmd->add_option("--k", f.k, "Number of selected indices")->required();
  cmd->add_option("--ties", f.ties, "Boundary ties: error | break-low-index")
      ->check(CLI::IsMember({"error", "break-low-index"}));
}

TiePolicy tie_policy(const std::string& s) {
  return s == "break-low-index" ? TiePolicy::kBreakLowIndex : TiePolicy::kError;
}

InputDocument read_input(const InputFlags& f) {
  std::optional<std::filesystem::path> cov;
  if (!f.covariance_csv.empty()) cov = f.covariance_csv;
  return load_input(f.input, cov);
}

Probability alpha_arg(double a) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  return Probability(a);
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void emit(std::ostream& out, const Json& doc) { out << write_json(doc) << '\n'; }

void emit_error(std::ostream& err, std::string_view code, const std::string& message,
                const std::vector<std::string>& details = {}) {
  Json e{{"error", {{"code", code}, {"message", message}, {"details", details}}}};
  err << write_json(e, 0) << '\n';
}

Json labels_of(const std::vector<Index>& idx, const std::vector<std::string>& labels) {
  Json out = Json::array();
  for (Index i : idx) out.push_back(labels[static_cast<std::size_t>(i)]);
  return out;
}

// verify -------------------------------------------------------------------

struct VerifyFlags {
  InputFlags in;
  double delta = 0.0;
  double alpha = 0.05;
  std::string method = "full";
  bool early_exit = false;
};

int cmd_verify(const VerifyFlags& f, std::ostream& out) {
  const InputDocument doc = read_input(f.in);
  const GaussianModel model = validate(doc.observations, doc.covariance);
  const auto method = method_from_string(f.method);
  VerifyOptions opts;
  opts.ties = tie_policy(f.in.ties);
  opts.early_exit = f.early_exit;
  const VerificationReport report = verify(model, f.in.k, f.delta, alpha_arg(f.alpha), *method, opts);

  if (f.in.format == "text") {
    out << format_text(report, doc.labels);
  } else {
    Json j = to_json(report);
    j["n"] = model.n();
    j["covariance_source"] = to_string(doc.source);
    if (!doc.labels.empty()) j["selected_labels"] = labels_of(report.selected, doc.labels);
    emit(out, j);
  }
  return report.reject ? kExitPositive : kExitNegative;
}

// clb ----------------------------------------------------------------------

struct ClbFlags {
  InputFlags in;
  double alpha = 0.05;
  std::string method = "exact";
  std::optional<double> tol;
};

int cmd_clb(const ClbFlags& f, std::ostream& out) {
  const InputDocument doc = read_input(f.in);
  const GaussianModel model = validate(doc.observations, doc.covariance);
  const Probability alpha = alpha_arg(f.alpha);
  const TiePolicy ties = tie_policy(f.in.ties);
  const LowerBound bound = *clb_method_from_string(f.method) == ClbMethod::kExact
                               ? clb_exact(model, f.in.k, alpha, f.tol, ties)
                               : clb_fast(model, f.in.k, alpha, ties);
  if (f.in.format == "text") {
    out << format_text(bound);
  } else {
    Json j = to_json(bound);
    j["k"] = f.in.k;
    j["n"] = model.n();
    j["selected"] = top_k(model, f.in.k, ties).inside;
    emit(out, j);
  }
  return bound.kind == BoundKind::kMinusInfinity ? kExitNegative : kExitPositive;
}

// hsd ----------------------------------------------------------------------

struct HsdFlags {
  InputFlags in;
  double alpha = 0.05;
  std::int64_t reps = kDefaultHsdReps;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

int cmd_hsd(const HsdFlags& f, std::ostream& out) {
  const InputDocument doc = read_input(f.in);
  const GaussianModel model = validate(doc.observations, doc.covariance);
  const Probability alpha = alpha_arg(f.alpha);
  const std::uint64_t seed = f.seed.value_or(fresh_seed());

  const HsdQuantile q = hsd_quantile(model.sigma(), alpha, f.reps, seed, f.threads);
  const Selection sel = top_k(model, f.in.k, tie_policy(f.in.ties));
  const bool hsd_reject = hsd_verify(model, sel, alpha, q);
  const RankVerifier verifier(model, sel);
  const VerificationReport full = verifier.verify(0.0, alpha, Method::kFull);
  const MinPair mp = min_pair(model, sel, 0.0);

  if (f.in.format == "text") {
    char line[200];
    std::snprintf(line, sizeof line,
                  "h               %.6g  (se %.3g, reps %lld, seed %llu)\n"
                  "pair            (%lld, %lld)\n"
                  "hsd decision    %s\n"
                  "full decision   %s  (worst p %.6g)\n",
                  q.h, q.std_error, static_cast<long long>(q.reps), static_cast<unsigned long long>(q.seed),
                  static_cast<long long>(mp.i), static_cast<long long>(mp.j),
                  hsd_reject ? "reject" : "no reject", full.reject ? "reject" : "no reject",
                  full.worst_p.value());
    out << line;
  } else {
    Json j;
    j["hsd"] = to_json(q);
    j["seed_generated"] = !f.seed.has_value();
    j["k"] = f.in.k;
    j["selected"] = sel.inside;
    j["pair"] = Json{{"i", mp.i}, {"j", mp.j}};
    j["hsd_reject"] = hsd_reject;
    j["full_reject"] = full.reject;
    j["full_worst_p"] = full.worst_p.value();
    j["dominance_holds"] = !hsd_reject || full.reject;
    emit(out, j);
  }
  return hsd_reject ? kExitPositive : kExitNegative;
}

// simulate -----------------------------------------------------------------

struct SimFlags {
  std::string scenario = "appendix-a";
  std::string estimand;
  std::string method = "full";
  std::int64_t reps = 10000;
  std::optional<std::uint64_t> seed;
  double alpha = 0.1;
  double delta = 0.0;
  std::string target_s;
  Index n = 5;
  int k = 1;
  double spread = kDefaultSpread;
  double rho = 0.0;
  std::int64_t hsd_reps = kDefaultHsdReps;
  int threads = 1;
  std::string format = "json";
};

std::vector<Index> parse_index_list(const std::string& s) {
  std::vector<Index> out;
  for (const auto& tok : split_csv_line(s)) {
    const double v = parse_real(tok);
    if (v != std::floor(v) || v < 0) throw Error(ErrorCode::kParse, "bad index '" + tok + "'");
    out.push_back(static_cast<Index>(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Scenario scenario_from_file(const std::string& path) {
  const Json doc = Json::parse(read_file(path));
  Scenario s;
  s.name = doc.value("name", std::string("file"));
  InputDocument tmp = parse_input_json(Json{{"observations", doc.at("mu")}, {"covariance", doc.at("covariance")}});
  s.mu = tmp.observations;
  s.sigma = tmp.covariance;
  s.k = doc.at("k").get<int>();
  if (doc.contains("pinned_inside")) s.pinned_inside = doc["pinned_inside"].get<std::vector<Index>>();
  if (doc.contains("pinned_outside")) s.pinned_outside = doc["pinned_outside"].get<std::vector<Index>>();
  return s;
}

Scenario build_scenario(const SimFlags& f) {
  if (f.scenario == "appendix-a") return scenario_appendix_a();
  if (f.scenario == "tightness") {
    return scenario_tightness(f.n, f.k, f.delta, cov_equicorrelated(f.n, 1.0, f.rho), f.spread);
  }
  if (f.scenario.rfind("file:", 0) == 0) {
    try {
      return scenario_from_file(f.scenario.substr(5));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("scenario file: ") + e.what());
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown scenario '" + f.scenario + "'");
}

// Indices of the k largest means, lower index first on ties.
std::vector<Index> default_target(const Scenario& s) {
  std::vector<Index> idx(static_cast<std::size_t>(s.mu.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return s.mu(a) > s.mu(b); });
  idx.resize(static_cast<std::size_t>(s.k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

int cmd_simulate(const SimFlags& f, std::ostream& out) {
  const Scenario scenario = build_scenario(f);
  const auto procedure = procedure_from_string(f.method);
  if (!procedure) throw Error(ErrorCode::kInvalidArgument, "unknown method '" + f.method + "'");

  SimConfig cfg;
  cfg.procedure = *procedure;
  if (f.estimand.empty()) {
    if (cfg.procedure == Procedure::kClbExact || cfg.procedure == Procedure::kClbFast) {
      cfg.estimand = Estimand::kClbCoverage;
    } else if (f.scenario == "tightness") {
      cfg.estimand = Estimand::kFalseRejection;
    } else {
      cfg.estimand = Estimand::kPower;
    }
  } else {
    const auto e = estimand_from_string(f.estimand);
    if (!e) throw Error(ErrorCode::kInvalidArgument, "unknown estimand '" + f.estimand + "'");
    cfg.estimand = *e;
  }
  cfg.target_s = f.target_s.empty() ? default_target(scenario) : parse_index_list(f.target_s);
  cfg.delta = f.delta;
  cfg.alpha = alpha_arg(f.alpha);
  cfg.reps = f.reps;
  cfg.seed = f.seed.value_or(fresh_seed());
  cfg.threads = f.threads;
  cfg.hsd_reps = f.hsd_reps;

  const SimResult r = estimate_conditional(scenario, cfg);
  if (f.format == "text") {
    out << format_text(r);
  } else if (f.format == "csv") {
    out << format_csv(r);
  } else {
    Json j = to_json(r);
    j["seed_generated"] = !f.seed.has_value();
    j["threads"] = cfg.threads;
    j["n"] = scenario.mu.size();
    j["k"] = scenario.k;
    j["target_s"] = cfg.target_s;
    emit(out, j);
  }
  return kExitPositive;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Selective rank verification for Gaussian estimates with known covariance",
               "rank-verify"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rank-verify 0.1.0");

  const int env_threads = default_thread_count();

  VerifyFlags vf;
  auto* verify_cmd = app.add_subcommand("verify", "Test whether the selected top-k beat the rest by delta");
  add_input_flags(verify_cmd, vf.in);
  verify_cmd->add_option("--delta", vf.delta, "Margin")->capture_default_str();
  verify_cmd->add_option("--alpha", vf.alpha, "Level")->capture_default_str();
  verify_cmd->add_option("--method", vf.method, "full | fast (alias fast-only)")
      ->check(CLI::IsMember({"full", "fast", "fast-only"}))
      ->capture_default_str();
  verify_cmd->add_flag("--early-exit", vf.early_exit, "Stop at the first pair with p > alpha");
  verify_cmd->add_option("--format", vf.in.format, "json | text")->check(CLI::IsMember({"json", "text"}));

  ClbFlags cf;
  auto* clb_cmd = app.add_subcommand("clb", "Lower confidence bound on the selected-vs-rest mean gap");
  add_input_flags(clb_cmd, cf.in);
  clb_cmd->add_option("--alpha", cf.alpha, "Level")->capture_default_str();
  clb_cmd->add_option("--method", cf.method, "exact | fast")
      ->check(CLI::IsMember({"exact", "fast"}))
      ->capture_default_str();
  clb_cmd->add_option("--tol", cf.tol, "Bisection width (default 1e-8 * (1 + max|x|))")
      ->check(CLI::PositiveNumber);
  clb_cmd->add_option("--format", cf.in.format, "json | text")->check(CLI::IsMember({"json", "text"}));

  HsdFlags hf;
  hf.threads = env_threads;
  auto* hsd_cmd = app.add_subcommand("hsd", "Tukey-HSD style baseline next to the selective test");
  add_input_flags(hsd_cmd, hf.in);
  hsd_cmd->add_option("--alpha", hf.alpha, "Level")->capture_default_str();
  hsd_cmd->add_option("--reps", hf.reps, "Monte Carlo draws for the quantile")
      ->check(CLI::Range(kMinHsdReps, std::int64_t{1} << 40))
      ->capture_default_str();
  hsd_cmd->add_option("--seed", hf.seed, "RNG seed (generated and reported when absent)");
  hsd_cmd->add_option("--threads", hf.threads, "Worker threads (default RANK_VERIFY_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  hsd_cmd->add_option("--format", hf.in.format, "json | text")->check(CLI::IsMember({"json", "text"}));

  SimFlags sf;
  sf.threads = env_threads;
  auto* sim_cmd = app.add_subcommand("simulate", "Conditional Monte Carlo power / error / coverage");
  sim_cmd->add_option("--scenario", sf.scenario, "appendix-a | tightness | file:<path>")->capture_default_str();
  sim_cmd->add_option("--estimand", sf.estimand, "power | false-rejection | clb-coverage")
      ->check(CLI::IsMember({"power", "false-rejection", "clb-coverage"}));
  sim_cmd->add_option("--method", sf.method, "full | fast-only | hsd | exact | fast")
      ->check(CLI::IsMember({"full", "fast-only", "hsd", "exact", "fast"}))
      ->capture_default_str();
  sim_cmd->add_option("--reps", sf.reps, "Total draws")->capture_default_str();
  sim_cmd->add_option("--seed", sf.seed, "RNG seed (generated and reported when absent)");
  sim_cmd->add_option("--alpha", sf.alpha, "Level")->capture_default_str();
  sim_cmd->add_option("--delta", sf.delta, "Margin (also mu_K - mu_{K+1} for tightness)")->capture_default_str();
  sim_cmd->add_option("--target-s", sf.target_s, "Comma-separated 0-based indices (default: top-k means)");
  sim_cmd->add_option("--n", sf.n, "Tightness: dimension")->capture_default_str();
  sim_cmd->add_option("--k", sf.k, "Tightness: selection size")->capture_default_str();
  sim_cmd->add_option("--spread", sf.spread, "Tightness: +-spread * scale stand-in for infinity")
      ->capture_default_str();
  sim_cmd->add_option("--rho", sf.rho, "Tightness: equicorrelation of the unit-variance covariance")
      ->capture_default_str();
  sim_cmd->add_option("--hsd-reps", sf.hsd_reps, "Draws for h when --method hsd")->capture_default_str();
  sim_cmd->add_option("--threads", sf.threads, "Worker threads (default RANK_VERIFY_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--format", sf.format, "json | text | csv")
      ->check(CLI::IsMember({"json", "text", "csv"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    return kExitError;
  }

  try {
    if (verify_cmd->parsed()) return cmd_verify(vf, out);
    if (clb_cmd->parsed()) return cmd_clb(cf, out);
    if (hsd_cmd->parsed()) return cmd_hsd(hf, out);
    return cmd_simulate(sf, out);
  } catch (const Error& e) {
    emit_error(err, to_string(e.code()), e.what(), e.details());
    return e.code() == ErrorCode::kInsufficientConditioning ? kExitInsufficientConditioning : kExitError;
  } catch (const Json::exception& e) {
    emit_error(err, "parse", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what());
    return kExitError;
  }
}

}  // namespace rankverify::cli
