#include "report.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "rankverify/error.hpp"

namespace rankverify::cli {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(ErrorCode::kParse, std::string("report is missing field '") + name + "'");
  }
  return j.at(name);
}

template <class Enum, class Parse>
Enum enum_field(const Json& j, const char* name, Parse parse) {
  const auto s = field(j, name).get<std::string>();
  const auto e = parse(s);
  if (!e) throw Error(ErrorCode::kParse, std::string("unknown ") + name + " '" + s + "'");
  return *e;
}

Probability prob(const Json& j, const char* name) { return Probability(decode_real(field(j, name))); }
double real(const Json& j, const char* name) { return decode_real(field(j, name)); }

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  if (s.rfind("0x", 0) != 0) throw Error(ErrorCode::kParse, "expected a 0x-prefixed checksum");
  return std::stoull(s.substr(2), nullptr, 16);
}

std::string fmt(double v, int precision = 6) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string name_of(Index i, const std::vector<std::string>& labels) {
  if (!labels.empty()) return labels[static_cast<std::size_t>(i)];
  return std::to_string(i);
}

Json pvalue_json(const SelectivePValue& p) {
  return Json{{"i", p.i},
              {"j", p.j},
              {"p", p.p.value()},
              {"trunc_lo", encode_real(p.trunc_lo)},
              {"trunc_hi", encode_real(p.trunc_hi)},
              {"d_delta", encode_real(p.d_delta)}};
}

}  // namespace

Json to_json(const VerificationReport& r) {
  Json j;
  j["reject"] = r.reject;
  j["alpha"] = r.alpha.value();
  j["delta"] = encode_real(r.delta);
  j["k"] = r.k;
  j["method"] = to_string(r.method);
  j["selected"] = r.selected;
  j["worst_pair"] = Json{{"i", r.worst_pair.i}, {"j", r.worst_pair.j}};
  j["worst_p"] = r.worst_p.value();
  j["worst_p_is_upper_bound"] = r.worst_p_is_upper_bound;
  j["pairs_total"] = r.pairs_total;
  j["early_exit"] = r.early_exit;
  j["fast_check"] = Json{{"i", r.fast_check.i},
                         {"j", r.fast_check.j},
                         {"d_plus", encode_real(r.fast_check.d_plus)},
                         {"p_two_sided", r.fast_check.p_two_sided.value()},
                         {"passes", r.fast_check.passes}};
  if (r.reduction_detected) {
    Json tag{{"kind", to_string(r.reduction_detected->kind)}, {"parameter", nullptr}};
    if (r.reduction_detected->parameter) tag["parameter"] = *r.reduction_detected->parameter;
    j["reduction_detected"] = tag;
  } else {
    j["reduction_detected"] = nullptr;
  }
  j["zero_correlation_pairs"] = r.zero_correlation_pairs;
  j["tie_broken"] = r.tie_broken;
  j["warnings"] = r.warnings;
  Json pairs = Json::array();
  for (const auto& p : r.all_pairs) pairs.push_back(pvalue_json(p));
  j["all_pairs"] = pairs;
  return j;
}

VerificationReport verification_report_from_json(const Json& j) {
  VerificationReport r;
  r.reject = field(j, "reject").get<bool>();
  r.alpha = prob(j, "alpha");
  r.delta = real(j, "delta");
  r.k = field(j, "k").get<int>();
  r.method = enum_field<Method>(j, "method", method_from_string);
  r.selected = field(j, "selected").get<std::vector<Index>>();
  r.worst_pair = {field(j, "worst_pair").at("i").get<Index>(), field(j, "worst_pair").at("j").get<Index>()};
  r.worst_p = prob(j, "worst_p");
  r.worst_p_is_upper_bound = field(j, "worst_p_is_upper_bound").get<bool>();
  r.pairs_total = field(j, "pairs_total").get<std::size_t>();
  r.early_exit = field(j, "early_exit").get<bool>();
  const Json& fc = field(j, "fast_check");
  r.fast_check.i = field(fc, "i").get<Index>();
  r.fast_check.j = field(fc, "j").get<Index>();
  r.fast_check.d_plus = real(fc, "d_plus");
  r.fast_check.p_two_sided = prob(fc, "p_two_sided");
  r.fast_check.passes = field(fc, "passes").get<bool>();
  const Json& red = field(j, "reduction_detected");
  if (!red.is_null()) {
    CovFamilyTag tag;
    tag.kind = enum_field<CovFamily>(red, "kind", cov_family_from_string);
    if (!field(red, "parameter").is_null()) tag.parameter = real(red, "parameter");
    r.reduction_detected = tag;
  }
  r.zero_correlation_pairs = field(j, "zero_correlation_pairs").get<std::size_t>();
  r.tie_broken = field(j, "tie_broken").get<bool>();
  r.warnings = field(j, "warnings").get<std::vector<std::string>>();
  for (const Json& p : field(j, "all_pairs")) {
    SelectivePValue s;
    s.i = field(p, "i").get<Index>();
    s.j = field(p, "j").get<Index>();
    s.p = prob(p, "p");
    s.trunc_lo = real(p, "trunc_lo");
    s.trunc_hi = real(p, "trunc_hi");
    s.d_delta = real(p, "d_delta");
    r.all_pairs.push_back(s);
  }
  return r;
}

Json to_json(const LowerBound& b) {
  Json j;
  j["kind"] = to_string(b.kind);
  if (b.kind == BoundKind::kFinite) {
    j["value"] = b.value;
  } else {
    j["value"] = to_string(b.kind);
  }
  j["alpha"] = b.alpha.value();
  j["method"] = to_string(b.method);
  j["iterations"] = b.iterations;
  j["bracket"] = Json::array({encode_real(b.bracket_lo), encode_real(b.bracket_hi)});
  j["tol"] = b.tol;
  return j;
}

LowerBound lower_bound_from_json(const Json& j) {
  LowerBound b;
  b.kind = enum_field<BoundKind>(j, "kind", bound_kind_from_string);
  switch (b.kind) {
    case BoundKind::kFinite: b.value = field(j, "value").get<double>(); break;
    case BoundKind::kMinusInfinity: b.value = -kInf; break;
    case BoundKind::kUnbounded: b.value = kInf; break;
  }
  b.alpha = prob(j, "alpha");
  b.method = enum_field<ClbMethod>(j, "method", clb_method_from_string);
  b.iterations = field(j, "iterations").get<int>();
  const Json& br = field(j, "bracket");
  if (!br.is_array() || br.size() != 2) throw Error(ErrorCode::kParse, "bracket must have two entries");
  b.bracket_lo = decode_real(br[0]);
  b.bracket_hi = decode_real(br[1]);
  b.tol = real(j, "tol");
  return b;
}

Json to_json(const HsdQuantile& q) {
  return Json{{"h", q.h},
              {"alpha", q.alpha.value()},
              {"reps", q.reps},
              {"seed", q.seed},
              {"std_error", q.std_error},
              {"n", q.n},
              {"sigma_checksum", hex64(q.sigma_checksum)},
              {"threads", q.threads}};
}

HsdQuantile hsd_quantile_from_json(const Json& j) {
  HsdQuantile q;
  q.h = real(j, "h");
  q.alpha = prob(j, "alpha");
  q.reps = field(j, "reps").get<std::int64_t>();
  q.seed = field(j, "seed").get<std::uint64_t>();
  q.std_error = real(j, "std_error");
  q.n = field(j, "n").get<Index>();
  q.sigma_checksum = parse_hex64(field(j, "sigma_checksum").get<std::string>());
  q.threads = field(j, "threads").get<int>();
  return q;
}

Json to_json(const SimResult& r) {
  Json j;
  j["scenario"] = r.scenario;
  j["estimand"] = to_string(r.estimand);
  j["method"] = to_string(r.procedure);
  j["alpha"] = r.alpha.value();
  j["delta"] = r.delta;
  j["seed"] = r.seed;
  j["draws"] = r.draws;
  j["replicates"] = r.replicates;
  j["conditioning_event_rate"] = r.conditioning_event_rate;
  j["conditional_rate"] = r.conditional_rate;
  j["std_error"] = r.std_error;
  j["pinned_violations"] = r.pinned_violations;
  j["hsd_h"] = r.hsd_h ? Json(*r.hsd_h) : Json(nullptr);
  return j;
}

SimResult sim_result_from_json(const Json& j) {
  SimResult r;
  r.scenario = field(j, "scenario").get<std::string>();
  r.estimand = enum_field<Estimand>(j, "estimand", estimand_from_string);
  r.procedure = enum_field<Procedure>(j, "method", procedure_from_string);
  r.alpha = prob(j, "alpha");
  r.delta = real(j, "delta");
  r.seed = field(j, "seed").get<std::uint64_t>();
  r.draws = field(j, "draws").get<std::int64_t>();
  r.replicates = field(j, "replicates").get<std::int64_t>();
  r.conditioning_event_rate = real(j, "conditioning_event_rate");
  r.conditional_rate = real(j, "conditional_rate");
  r.std_error = real(j, "std_error");
  r.pinned_violations = field(j, "pinned_violations").get<std::int64_t>();
  if (!field(j, "hsd_h").is_null()) r.hsd_h = real(j, "hsd_h");
  return r;
}

std::string format_text(const VerificationReport& r, const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << "decision        " << (r.reject ? "reject" : "no reject") << '\n';
  os << "method          " << to_string(r.method) << '\n';
  os << "alpha           " << fmt(r.alpha.value()) << '\n';
  os << "delta           " << fmt(r.delta) << '\n';
  os << "selected        ";
  for (std::size_t a = 0; a < r.selected.size(); ++a) {
    os << (a ? ", " : "") << name_of(r.selected[a], labels);
  }
  os << '\n';
  os << "worst pair      (" << name_of(r.worst_pair.i, labels) << ", " << name_of(r.worst_pair.j, labels)
     << ")\n";
  os << "worst p         " << fmt(r.worst_p.value(), 10)
     << (r.worst_p_is_upper_bound ? "  (upper bound)" : "") << '\n';
  os << "fast check      " << (r.fast_check.passes ? "passes" : "fails") << "  p2="
     << fmt(r.fast_check.p_two_sided.value(), 10) << '\n';
  if (r.reduction_detected) {
    os << "reduction       " << to_string(r.reduction_detected->kind) << '\n';
  }
  for (const auto& w : r.warnings) os << "warning         " << w << '\n';
  if (!r.all_pairs.empty()) {
    char line[160];
    std::snprintf(line, sizeof line, "\n%-10s %-10s %14s %14s %14s %14s\n", "i", "j", "d_delta",
                  "trunc_lo", "trunc_hi", "p");
    os << line;
    for (const auto& p : r.all_pairs) {
      std::snprintf(line, sizeof line, "%-10s %-10s %14s %14s %14s %14s\n",
                    name_of(p.i, labels).c_str(), name_of(p.j, labels).c_str(), fmt(p.d_delta).c_str(),
                    fmt(p.trunc_lo).c_str(), fmt(p.trunc_hi).c_str(), fmt(p.p.value()).c_str());
      os << line;
    }
  }
  return os.str();
}

std::string format_text(const LowerBound& b) {
  std::ostringstream os;
  os << "lower bound     "
     << (b.kind == BoundKind::kFinite ? fmt(b.value, 12) : std::string(to_string(b.kind))) << '\n';
  os << "method          " << to_string(b.method) << '\n';
  os << "alpha           " << fmt(b.alpha.value()) << '\n';
  os << "iterations      " << b.iterations << '\n';
  os << "bracket         [" << fmt(b.bracket_lo, 12) << ", " << fmt(b.bracket_hi, 12) << "]\n";
  os << "tol             " << fmt(b.tol) << '\n';
  return os.str();
}

std::string format_text(const SimResult& r) {
  std::ostringstream os;
  os << "scenario        " << r.scenario << '\n';
  os << "estimand        " << to_string(r.estimand) << '\n';
  os << "method          " << to_string(r.procedure) << '\n';
  os << "alpha, delta    " << fmt(r.alpha.value()) << ", " << fmt(r.delta) << '\n';
  os << "seed            " << r.seed << '\n';
  os << "replicates      " << r.replicates << " of " << r.draws << " draws (event rate "
     << fmt(r.conditioning_event_rate) << ")\n";
  os << "rate            " << fmt(r.conditional_rate) << "  se " << fmt(r.std_error) << '\n';
  if (r.hsd_h) os << "hsd h           " << fmt(*r.hsd_h) << '\n';
  if (r.pinned_violations) os << "pinned leaks    " << r.pinned_violations << '\n';
  return os.str();
}

std::string format_csv(const SimResult& r) {
  std::ostringstream os;
  os << "scenario,estimand,method,alpha,delta,seed,draws,replicates,conditioning_event_rate,"
        "conditional_rate,std_error,pinned_violations\n";
  char buf[64];
  const auto g = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << r.scenario << ',' << to_string(r.estimand) << ',' << to_string(r.procedure) << ','
     << g(r.alpha.value()) << ',' << g(r.delta) << ',' << r.seed << ',' << r.draws << ','
     << r.replicates << ',' << g(r.conditioning_event_rate) << ',' << g(r.conditional_rate) << ','
     << g(r.std_error) << ',' << r.pinned_violations << '\n';
  return os.str();
}

}  // namespace rankverify::cli
