#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "osplit/core/types.hpp"

namespace osplit {

enum class CsvSchema { matrix, svm };

struct CsvOptions {
  CsvSchema schema = CsvSchema::matrix;
  bool skip_header = false;
};

/// `values` holds every column for the matrix schema; for the svm schema the
/// last column is split off into `labels`.
struct CsvData {
  Matrix values;
  std::optional<Vector> labels;
  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_decimal(const std::string& tok, const std::string& where) {
  const std::string t = trim(tok);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw CsvError(where + ": cannot parse '" + t + "' as a number");
  return v;
}

}  // namespace detail

inline CsvData parse_csv(std::istream& in, const CsvOptions& opt, const std::string& name = "csv") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (opt.skip_header && lineno == 1) continue;
    if (detail::trim(line).empty()) continue;
    const std::string where = name + " line " + std::to_string(lineno);
    std::vector<double> r;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      r.push_back(detail::parse_decimal(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start), where));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (width == 0) width = r.size();
    if (r.size() != width)
      throw CsvError(where + ": expected " + std::to_string(width) + " columns, got " + std::to_string(r.size()));
    if (opt.schema == CsvSchema::svm) {
      if (width < 2) throw CsvError(where + ": svm schema needs features and a label");
      if (r.back() != 1.0 && r.back() != -1.0)
        throw CsvError(where + ": label must be -1 or +1");
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw CsvError(name + ": no data rows");

  CsvData d;
  const Index m = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(width) - (opt.schema == CsvSchema::svm ? 1 : 0);
  d.values.resize(m, c);
  if (opt.schema == CsvSchema::svm) d.labels = Vector(m);
  for (Index i = 0; i < m; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (Index j = 0; j < c; ++j) d.values(i, j) = r[static_cast<std::size_t>(j)];
    if (d.labels) (*d.labels)[i] = r.back();
  }
  return d;
}

inline CsvData load_csv(const std::string& path, const CsvOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw CsvError(path + ": cannot open file");
  return parse_csv(in, opt, path);
}

}  // namespace osplit
