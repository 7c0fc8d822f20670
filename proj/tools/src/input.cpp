#include "input.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rankverify/error.hpp"

namespace rankverify::cli {

std::string_view to_string(CovarianceSource source) {
  switch (source) {
    case CovarianceSource::kCovariance: return "covariance";
    case CovarianceSource::kSamples: return "samples";
    case CovarianceSource::kCounts: return "counts";
  }
  return "covariance";
}

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::kParse, what); }

Vector read_vector(const Json& j, const char* field) {
  if (!j.is_array()) parse_error(std::string(field) + " must be an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) parse_error(std::string(field) + "[" + std::to_string(i) + "] is not a number");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix read_matrix(const Json& j, const char* field) {
  if (!j.is_array() || j.empty()) parse_error(std::string(field) + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      parse_error(std::string(field) + " row " + std::to_string(r) + " has the wrong length");
    }
    m.row(static_cast<Index>(r)) = read_vector(j[r], field).transpose();
  }
  return m;
}

void check_labels(const InputDocument& doc) {
  if (!doc.labels.empty() && doc.labels.size() != static_cast<std::size_t>(doc.observations.size())) {
    parse_error("labels has " + std::to_string(doc.labels.size()) + " entries for " +
                std::to_string(doc.observations.size()) + " observations");
  }
}

}  // namespace

InputDocument parse_input_json(const Json& doc) {
  if (!doc.is_object()) parse_error("input document must be a JSON object");

  const int sources = static_cast<int>(doc.contains("covariance")) +
                      static_cast<int>(doc.contains("samples")) +
                      static_cast<int>(doc.contains("counts"));
  if (sources != 1) {
    parse_error("exactly one of covariance, samples or counts must be present");
  }

  InputDocument out;
  if (doc.contains("labels")) {
    if (!doc["labels"].is_array()) parse_error("labels must be an array of strings");
    for (const auto& l : doc["labels"]) {
      if (!l.is_string()) parse_error("labels must be an array of strings");
      out.labels.push_back(l.get<std::string>());
    }
  }

  if (doc.contains("counts")) {
    if (doc.contains("observations")) {
      parse_error("observations are derived from counts in multinomial mode; omit them");
    }
    if (!doc.contains("t") || !doc["t"].is_number_integer()) parse_error("counts mode needs an integer t");
    if (!doc["counts"].is_array()) parse_error("counts must be an array of integers");
    for (const auto& c : doc["counts"]) {
      if (!c.is_number_integer()) parse_error("counts must be an array of integers");
      out.counts.push_back(c.get<std::int64_t>());
    }
    out.t = doc["t"].get<std::int64_t>();
    auto approx = multinomial_gaussian_approx(out.counts, out.t);
    out.observations = std::move(approx.pi_hat);
    out.covariance = std::move(approx.sigma);
    out.source = CovarianceSource::kCounts;
    check_labels(out);
    return out;
  }

  if (!doc.contains("observations")) parse_error("observations are required");
  out.observations = read_vector(doc["observations"], "observations");
  if (doc.contains("covariance")) {
    out.covariance = read_matrix(doc["covariance"], "covariance");
    out.source = CovarianceSource::kCovariance;
  } else {
    const Matrix samples = read_matrix(doc["samples"], "samples");
    if (samples.cols() != out.observations.size()) {
      parse_error("samples must have one column per observation");
    }
    out.covariance = sample_covariance(samples);
    out.source = CovarianceSource::kSamples;
  }
  check_labels(out);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) parse_error("not a number: '" + token + "'");
  return v;
}

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

}  // namespace

InputDocument parse_input_csv(const std::string& observations_csv, const std::string& covariance_csv) {
  const auto obs = csv_rows(observations_csv);
  if (obs.size() != 2) parse_error("observations CSV must have a header row and exactly one data row");
  const auto& header = obs[0];
  const std::size_t n = header.size();
  if (obs[1].size() != n) parse_error("observations CSV data row length differs from the header");

  InputDocument out;
  out.labels = header;
  out.observations.resize(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) out.observations(static_cast<Index>(i)) = parse_real(obs[1][i]);

  const auto cov = csv_rows(covariance_csv);
  if (cov.size() != n + 1) {
    parse_error("covariance CSV must have a header row and " + std::to_string(n) + " data rows");
  }
  if (cov[0] != header) parse_error("covariance CSV header does not match the observations header");
  out.covariance.resize(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (cov[r + 1].size() != n) parse_error("covariance CSV row " + std::to_string(r + 1) + " has the wrong length");
    for (std::size_t c = 0; c < n; ++c) {
      out.covariance(static_cast<Index>(r), static_cast<Index>(c)) = parse_real(cov[r + 1][c]);
    }
  }
  out.source = CovarianceSource::kCovariance;
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

InputDocument load_input(const std::filesystem::path& path,
                         const std::optional<std::filesystem::path>& covariance_csv) {
  if (path.extension() == ".csv") {
    if (!covariance_csv) parse_error("CSV observations need --covariance <file.csv>");
    return parse_input_csv(read_file(path), read_file(*covariance_csv));
  }
  if (covariance_csv) parse_error("--covariance is only used with CSV observations");
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    parse_error(path.string() + ": " + e.what());
  }
  return parse_input_json(doc);
}

}  // namespace rankverify::cli
