#pragma once

#include <algorithm>
#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cvqdyn/cli/config.hpp"
#include "cvqdyn/cli/output.hpp"

namespace cvq::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { Ok = 0, Usage = 1, ConfigInvalid = 2, NumericalFailure = 3, InvariantViolation = 4 };

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::string tier = "fast";
  unsigned threads = 1;
};

struct RunResult {
  std::vector<std::pair<std::string, CsvTable>> tables;  // file stem -> table
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> solver;
};

std::vector<std::string> scenario_kinds();

// Compute only; nothing is written.
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts);

// Compute, write the tables and manifest.json, and map failures to exit codes.
int execute(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& log);

// fn(i) for i in [0, n) over at most `threads` workers; results keep index order
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> err(n);
  const unsigned w = std::max(1u, std::min<unsigned>(threads, unsigned(n)));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      for (std::size_t i = k; i < n; i += w) {
        try {
          out[i] = fn(i);
        } catch (...) {
          err[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace cvq::cli
