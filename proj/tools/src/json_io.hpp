#pragma once

#include <string>

#include <json.hpp>

namespace rankverify::cli {

using Json = nlohmann::ordered_json;

/// Pretty-prints with every floating-point number written as %.17g, so a
/// parse of the output recovers each double bit-for-bit.
std::string write_json(const Json& doc, int indent = 2);

/// Finite reals become numbers; +-inf become "plus-infinity" /
/// "minus-infinity" so no sentinel numerics appear in reports.
Json encode_real(double value);
double decode_real(const Json& value);

}  // namespace rankverify::cli
