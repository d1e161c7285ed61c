#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cvqdyn/cli/config.hpp"
#include "cvqdyn/cli/scenarios.hpp"
#include "cvqdyn/core.hpp"

using namespace cvq::cli;

namespace {

unsigned env_threads() {
  const char* s = std::getenv("CVQDYN_THREADS");
  if (!s || !*s) return 1;
  try {
    const long v = std::stol(s);
    return v > 0 ? unsigned(v) : 1u;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cvqdyn: continuous-variable quantum dynamics of interacting masses"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config, out = "out", tier = "fast";
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "run a scenario and write CSV tables plus manifest.json");
  run->add_option("--config", config, "scenario TOML file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory");
  run->add_option("--tier", tier, "fast or slow")->check(CLI::IsMember({"fast", "slow"}));
  run->add_option("--threads", threads, "worker threads (default: CVQDYN_THREADS or 1)");

  auto* val = app.add_subcommand("validate", "check a config without running it");
  val->add_option("--config", config, "scenario TOML file")->required()->check(CLI::ExistingFile);

  std::string kind;
  auto* des = app.add_subcommand("describe", "print the schema of a scenario kind with units");
  des->add_option("kind", kind, "scenario kind");
  des->add_option("--config", config, "take the kind from this scenario file")->check(CLI::ExistingFile);

  auto* list = app.add_subcommand("list-scenarios", "print the available scenario kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? Ok : Usage;
  }

  try {
    if (*list) {
      for (const auto& s : schemas()) std::cout << s.kind << "  " << s.summary << '\n';
      return Ok;
    }
    if (*des) {
      if (kind.empty() && config.empty()) throw ConfigError("scenario", "describe needs a kind or --config");
      std::cout << describe(schema_for(kind.empty() ? load_config(config).kind() : kind));
      return Ok;
    }
    const auto cfg = load_config(config);
    if (*val) {
      std::cout << "ok: " << cfg.kind() << '\n';
      return Ok;
    }
    RunOptions opts;
    opts.out_dir = out;
    opts.tier = tier;
    opts.threads = threads > 0 ? threads : env_threads();
    return execute(cfg, opts, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config invalid [" << e.field() << "]: " << e.what() << '\n';
    return ConfigInvalid;
  } catch (const cvq::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return NumericalFailure;
  }
}
