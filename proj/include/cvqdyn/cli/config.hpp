#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvq::cli {

enum class FieldType { Number, NumberList, Integer, String, Bool };

struct Field {
  std::string key;       // dotted path, e.g. "physics.sigma"
  FieldType type = FieldType::Number;
  std::string unit;
  std::string doc;
  bool required = false;
  std::string fallback;  // TOML literal used when absent; empty means none
  bool positive = false;
  std::vector<std::string> choices;
};

struct Schema {
  std::string kind;
  std::string summary;
  std::string units;  // unit system of the scenario
  std::vector<Field> fields;
  // groups of keys of which at least one must be present
  std::vector<std::vector<std::string>> one_of;
};

const std::vector<Schema>& schemas();
const Schema& schema_for(const std::string& kind);
std::string describe(const Schema& s);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what) : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ScenarioConfig {
 public:
  ScenarioConfig(std::string text, const std::string& origin);
  ~ScenarioConfig();
  ScenarioConfig(ScenarioConfig&&) noexcept;

  const std::string& kind() const { return kind_; }
  const std::string& tier() const { return tier_; }
  const std::string& text() const { return text_; }
  const std::string& sha256() const { return sha256_; }
  const Schema& schema() const { return *schema_; }

  bool has(const std::string& key) const;
  double number(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;  // scalar or array
  long integer(const std::string& key) const;
  std::string string(const std::string& key) const;
  bool flag(const std::string& key) const;

 private:
  std::string text_, sha256_, kind_, tier_ = "fast";
  const Schema* schema_ = nullptr;
  struct Data;
  std::unique_ptr<Data> data_;

  const Field& field(const std::string& key) const;
  void validate() const;
};

// Parse and validate; throws ConfigError naming the offending field.
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace cvq::cli
