// SPDX-License-Identifier: Apache-2.0
//
// fasisabc [outage|ecr|esr|tradeoff|validate] [--config PATH] [flags]
//
// Writes the CSV to --out and the resolved configuration to <out>.manifest.
// Exit codes: 0 ok, 1 usage or config error, 2 numeric failure, 3 validation failure.

#include "fasisabc/cli/sweeps.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNumeric = 2, kValidation = 3 };

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw fas::cli::ConfigError(path, 0, "--config", "cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"FAS-aided NOMA backscatter ISAC performance sweeps", "fasisabc"};
  app.set_version_flag("--version", FASISABC_VERSION);

  std::string command_text;
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<fas::cli::Override> overrides;
  std::map<std::string, std::string> flag_values;

  app.add_option("command", command_text, "outage, ecr, esr, tradeoff or validate (may come from the config)");
  app.add_option("--config", config_path, "key = value configuration file or a run manifest");
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"--snr-db", "snr_db"}, {"--mu", "mu"},           {"--modes", "modes"},         {"--trials", "trials"},
      {"--seed", "seed"},     {"--glq-order", "glq_order"}, {"--mvn-tol", "mvn_tol"}, {"--out", "out"},
  };
  for (const auto& [flag, key] : flags) {
    app.add_option(flag, flag_values[key], "sets '" + key + "'");
  }
  app.add_option("--set", sets, "extra KEY=VALUE assignments, applied after the flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  fas::cli::RunConfig cfg;
  fas::cli::Command command = fas::cli::Command::Outage;
  try {
    for (const auto& [flag, key] : flags) {
      if (app.count(flag) > 0) {
        overrides.push_back({key, flag_values[key], flag});
      }
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw fas::cli::ConfigError("--set", 0, s, "expected KEY=VALUE");
      }
      overrides.push_back({s.substr(0, eq), s.substr(eq + 1), "--set"});
    }
    const std::string text = config_path.empty() ? std::string() : read_file(config_path);
    cfg = fas::cli::parse_config(text, config_path.empty() ? "<defaults>" : config_path, overrides);

    std::optional<fas::cli::Command> from_cli;
    if (!command_text.empty()) {
      from_cli = fas::cli::parse_command(command_text);
      if (!from_cli) {
        std::cerr << "fasisabc: unknown command '" << command_text << "'\n";
        return kUsage;
      }
    }
    if (from_cli && cfg.command && *from_cli != *cfg.command) {
      std::cerr << "fasisabc: command '" << command_text << "' conflicts with the configured command '"
                << fas::cli::to_string(*cfg.command) << "'\n";
      return kUsage;
    }
    if (!from_cli && !cfg.command) {
      std::cerr << "fasisabc: no command given\n" << app.help();
      return kUsage;
    }
    command = from_cli ? *from_cli : *cfg.command;
    cfg = fas::cli::resolve_for(command, cfg);
  } catch (const fas::cli::ConfigError& e) {
    std::cerr << "fasisabc: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "fasisabc: " << e.what() << "\n";
    return kUsage;
  }

  try {
    fas::cli::Table table;
    int failures = 0;
    switch (command) {
      case fas::cli::Command::Outage:
        table = fas::cli::run_outage_sweep(cfg);
        break;
      case fas::cli::Command::Ecr:
        table = fas::cli::run_ecr_sweep(cfg);
        break;
      case fas::cli::Command::Esr:
        table = fas::cli::run_esr_sweep(cfg);
        break;
      case fas::cli::Command::Tradeoff:
        table = fas::cli::run_tradeoff(cfg);
        break;
      case fas::cli::Command::Validate: {
        auto report = fas::cli::run_validate(cfg);
        table = std::move(report.table);
        failures = report.failures;
        break;
      }
    }
    write_file(cfg.output_path, table.to_csv());
    write_file(cfg.output_path + ".manifest", fas::cli::render_manifest(cfg, table));
    std::cerr << "fasisabc: wrote " << table.rows.size() << " rows to " << cfg.output_path << "\n";
    if (failures > 0) {
      std::cerr << "fasisabc: " << failures << " validation row(s) failed\n";
      return kValidation;
    }
  } catch (const std::exception& e) {
    std::cerr << "fasisabc: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}
