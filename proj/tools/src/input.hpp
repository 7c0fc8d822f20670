#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json_io.hpp"
#include "rankverify/model.hpp"

namespace rankverify::cli {

enum class CovarianceSource { kCovariance, kSamples, kCounts };

std::string_view to_string(CovarianceSource source);

/// Parsed input document: observations plus exactly one covariance source.
struct InputDocument {
  Vector observations;
  Matrix covariance;
  CovarianceSource source = CovarianceSource::kCovariance;
  std::vector<std::string> labels;  // empty when not supplied
  /// Multinomial mode only.
  std::vector<std::int64_t> counts;
  std::int64_t t = 0;
};

/// JSON document:
///   {"observations": [...], "covariance": [[...], ...]}
///   {"observations": [...], "samples": [[...], ...]}
///   {"counts": [...], "t": N}          (observations become counts / t)
/// with an optional "labels" array in each form.
InputDocument parse_input_json(const Json& doc);

/// CSV pair: the observations file has a header row of labels and one row
/// of values; the covariance file repeats the header and holds n rows.
InputDocument parse_input_csv(const std::string& observations_csv,
                              const std::string& covariance_csv);

/// Dispatches on the extension: .csv requires `covariance_csv`.
InputDocument load_input(const std::filesystem::path& path,
                         const std::optional<std::filesystem::path>& covariance_csv);

/// One CSV line split on commas, surrounding whitespace trimmed.
std::vector<std::string> split_csv_line(const std::string& line);
double parse_real(const std::string& token);

std::string read_file(const std::filesystem::path& path);

}  // namespace rankverify::cli
