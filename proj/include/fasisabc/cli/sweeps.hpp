// SPDX-License-Identifier: Apache-2.0
//
// Sweep drivers behind the command-line tool. Each returns a table whose
// column set depends only on the command; Monte Carlo cells are left empty
// when trials = 0.

#ifndef FASISABC_CLI_SWEEPS_HPP
#define FASISABC_CLI_SWEEPS_HPP

#include "fasisabc/cli/config.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fas::cli {

struct Column
{
  std::string name;
  std::string provenance;
};

struct Table
{
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// A numeric failure with the grid point it happened at.
class SweepError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

Table run_outage_sweep(const RunConfig& cfg);
Table run_ecr_sweep(const RunConfig& cfg);
Table run_esr_sweep(const RunConfig& cfg);
Table run_tradeoff(const RunConfig& cfg);

struct ValidationReport
{
  Table table;
  int failures = 0;
};

/// snr x user x {op, ecr} rows for the first configured mode.
ValidationReport run_validate(const RunConfig& cfg);

/// Fills defaults that depend on the command (validate always simulates).
RunConfig resolve_for(Command command, RunConfig cfg);

/// key = value text that reproduces the run when passed back via --config.
std::string render_manifest(const RunConfig& cfg, const Table& table);

}  // namespace fas::cli

#endif  // FASISABC_CLI_SWEEPS_HPP
