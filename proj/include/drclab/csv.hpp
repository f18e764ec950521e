#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace drclab {

/// Column-oriented CSV writer with deterministic, locale-independent number
/// formatting (shortest round-trip decimal). Reruns with identical inputs
/// produce byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> column_names);

  void add_row(const std::vector<double>& values);

  /// Serializes header plus all rows, "\n" line endings.
  std::string to_string() const;
  void write(const std::string& path) const;

  Eigen::Index row_count() const { return static_cast<Eigen::Index>(rows_.size()); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace drclab
