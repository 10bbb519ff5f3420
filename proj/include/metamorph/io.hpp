#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace metamorph {

// Shortest exact decimal form ("%.17g"); byte-stable across reruns.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void header(const std::vector<std::string>& names);
  void row(std::span<const double> values);
  // Mixed row: leading labels then numeric cells.
  void row(const std::vector<std::string>& labels, std::span<const double> values);

 private:
  std::ofstream out_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// CSV of doubles; rows may be ragged. Skips a leading header line when
// its first cell is not numeric.
std::vector<std::vector<double>> read_csv_table(const std::string& path);

}  // namespace metamorph
