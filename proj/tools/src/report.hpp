#pragma once

#include <string>
#include <vector>

#include "json_io.hpp"
#include "rankverify/baselines.hpp"
#include "rankverify/clb.hpp"
#include "rankverify/sim.hpp"
#include "rankverify/verifier.hpp"

namespace rankverify::cli {

Json to_json(const VerificationReport& report);
Json to_json(const LowerBound& bound);
Json to_json(const HsdQuantile& quantile);
Json to_json(const SimResult& result);

VerificationReport verification_report_from_json(const Json& j);
LowerBound lower_bound_from_json(const Json& j);
HsdQuantile hsd_quantile_from_json(const Json& j);
SimResult sim_result_from_json(const Json& j);

std::string format_text(const VerificationReport& report, const std::vector<std::string>& labels);
std::string format_text(const LowerBound& bound);
std::string format_text(const SimResult& result);

/// Header plus one data row.
std::string format_csv(const SimResult& result);

}  // namespace rankverify::cli
