#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace cvq::cli {

// Rectangular table of finite values with one unit per column.
class CsvTable {
 public:
  CsvTable() = default;
  CsvTable(std::vector<std::string> columns, std::vector<std::string> units);

  void meta(const std::string& key, const std::string& value);
  void meta(const std::string& key, double value);
  // Throws InvalidArgument on a width mismatch or a non-finite entry.
  void add_row(const std::vector<double>& row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t column(const std::string& name) const;

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_, units_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<double>> rows_;
};

// Shortest decimal form that round-trips.
std::string format_number(double v);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Manifest {
  std::string config_sha256;
  std::string version;
  std::string scenario;
  std::string tier;
  double wall_seconds = 0;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> solver;  // settings actually used
  std::vector<std::string> files;
};

void write_manifest(const Manifest& m, const std::filesystem::path& path);
std::string sha256_hex(const std::string& data);

}  // namespace cvq::cli
