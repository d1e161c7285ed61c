#include "cvqdyn/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "cvqdyn/core.hpp"

namespace cvq::cli {

CsvTable::CsvTable(std::vector<std::string> columns, std::vector<std::string> units)
    : columns_(std::move(columns)), units_(std::move(units)) {
  if (columns_.size() != units_.size()) throw Error(ErrorCode::InvalidArgument, "one unit per column is required");
}

void CsvTable::meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
void CsvTable::meta(const std::string& key, double value) { meta_.emplace_back(key, format_number(value)); }

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != columns_.size()) {
    std::ostringstream os;
    os << "row of width " << row.size() << " for " << columns_.size() << " columns";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row[i])) {
      std::ostringstream os;
      os << "non-finite value in column " << columns_[i] << " at row " << rows_.size();
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
  rows_.push_back(row);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  throw Error(ErrorCode::InvalidArgument, "no column " + name);
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << '\n';
  os << "# units: ";
  for (std::size_t i = 0; i < units_.size(); ++i) os << (i ? "," : "") << units_[i];
  os << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  f << str();
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["config_sha256"] = m.config_sha256;
  j["version"] = m.version;
  j["scenario"] = m.scenario;
  j["tier"] = m.tier;
  j["wall_seconds"] = m.wall_seconds;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : m.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    if (!c.detail.empty()) e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.solver) s[k] = v;
  j["solver"] = s;
  j["files"] = m.files;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  f << j.dump(2) << '\n';
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

}  // namespace cvq::cli
