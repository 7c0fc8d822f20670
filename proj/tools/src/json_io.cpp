#include "json_io.hpp"

#include <cmath>
#include <cstdio>

#include "rankverify/error.hpp"
#include "rankverify/numerics.hpp"

namespace rankverify::cli {

namespace {

void write_value(const Json& j, std::string& out, int indent, int level) {
  const auto pad = [&](int lvl) {
    if (indent > 0) {
      out += '\n';
      out.append(static_cast<std::size_t>(indent * lvl), ' ');
    }
  };

  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        pad(level + 1);
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        write_value(it.value(), out, indent, level + 1);
      }
      pad(level);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short arrays of scalars stay on one line.
      bool flat = j.size() <= 16;
      for (const auto& e : j) flat = flat && e.is_primitive();
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat && indent > 0 ? ", " : ",";
        first = false;
        if (!flat) pad(level + 1);
        write_value(e, out, indent, level + 1);
      }
      if (!flat) pad(level);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInternalInconsistency, "non-finite number reached the JSON writer");
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string write_json(const Json& doc, int indent) {
  std::string out;
  write_value(doc, out, indent, 0);
  return out;
}

Json encode_real(double value) {
  if (std::isnan(value)) throw Error(ErrorCode::kDomain, "NaN cannot be serialized");
  if (value == kInf) return "plus-infinity";
  if (value == -kInf) return "minus-infinity";
  return value;
}

double decode_real(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "plus-infinity") return kInf;
    if (s == "minus-infinity") return -kInf;
  }
  throw Error(ErrorCode::kParse, "expected a number or an infinity string, got " + value.dump());
}

}  // namespace rankverify::cli
