// SPDX-License-Identifier: Apache-2.0
//
// Flat `key = value` run configuration. This is the only place where dB
// values are converted to linear scale.

#ifndef FASISABC_CLI_CONFIG_HPP
#define FASISABC_CLI_CONFIG_HPP

#include "fasisabc/analysis.hpp"
#include "fasisabc/montecarlo.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fas::cli {

enum class Command { Outage, Ecr, Esr, Tradeoff, Validate };

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view text);

struct RunConfig
{
  std::optional<Command> command;
  SystemParams params;
  SensingParams sensing;
  FasGeometry geometry_near{2, 2, 1.0, 1.0};
  FasGeometry geometry_far{2, 2, 1.0, 1.0};
  std::vector<BenchmarkMode> modes{BenchmarkMode::FasIsabc, BenchmarkMode::FasIsac, BenchmarkMode::TasIsabc,
                                   BenchmarkMode::TasIsac};
  std::vector<double> snr_db_grid;
  std::vector<double> mu_grid;
  double tradeoff_snr_db = 10.0;
  int quadrature_order = kDefaultLaguerreOrder;
  double mvn_tol = 1e-4;
  PdfModel pdf = PdfModel::CopulaDiagonal;
  // Thresholds as given, kept in dB so manifests round-trip exactly.
  double gamma_hat_sic_db = 0.0;
  double gamma_hat_un_db = 0.0;
  double gamma_hat_uf_db = 0.0;
  std::int64_t trials = 0;  // 0 disables the Monte Carlo columns
  std::uint64_t seed = 1;
  int shards = 1;
  bool coherent_mode = false;
  int workers = 1;
  std::string output_path;

  MvnOptions mvn_options() const;
  /// Empty when trials = 0.
  std::optional<TrialConfig> mc() const;
};

/// Trials used by `validate` when the configuration does not set any.
inline constexpr std::int64_t kDefaultValidateTrials = 100000;

class ConfigError : public std::runtime_error
{
public:
  ConfigError(const std::string& source, int line, const std::string& key, const std::string& message);

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

private:
  std::string key_;
  int line_;
};

/// A value set from the command line; `origin` names the flag in errors.
struct Override
{
  std::string key;
  std::string value;
  std::string origin;
};

/// Parses the file text, then applies the overrides on top. Throws ConfigError
/// naming the line (0 for flags) and key of the first problem.
RunConfig parse_config(std::string_view text, const std::string& source = "<config>",
                       const std::vector<Override>& overrides = {});

/// "A:B:STEP" (inclusive of B up to rounding) or a comma list.
std::vector<double> expand_grid(std::string_view text);

/// Shortest round-trip decimal form.
std::string format_number(double value);

/// Resolved configuration as `key = value` lines that parse back to the same
/// RunConfig.
std::string render_config(const RunConfig& cfg);

}  // namespace fas::cli

#endif  // FASISABC_CLI_CONFIG_HPP
