// SPDX-License-Identifier: Apache-2.0

#include "fasisabc/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace fas::cli {

std::string_view to_string(Command command)
{
  switch (command) {
    case Command::Outage:
      return "outage";
    case Command::Ecr:
      return "ecr";
    case Command::Esr:
      return "esr";
    case Command::Tradeoff:
      return "tradeoff";
    case Command::Validate:
      return "validate";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view text)
{
  for (Command c : {Command::Outage, Command::Ecr, Command::Esr, Command::Tradeoff, Command::Validate}) {
    if (text == to_string(c)) {
      return c;
    }
  }
  return std::nullopt;
}

MvnOptions RunConfig::mvn_options() const
{
  MvnOptions opts;
  opts.abs_tol = mvn_tol;
  return opts;
}

std::optional<TrialConfig> RunConfig::mc() const
{
  if (trials <= 0) {
    return std::nullopt;
  }
  return TrialConfig{trials, seed, shards, coherent_mode};
}

namespace {

std::string error_text(const std::string& source, int line, const std::string& key, const std::string& message)
{
  std::ostringstream os;
  os << source;
  if (line > 0) {
    os << ":" << line;
  }
  os << ": key '" << key << "': " << message;
  return os.str();
}

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text)
{
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(value)) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  }
  return value;
}

template <typename Int>
Int parse_integer(std::string_view text)
{
  text = trim(text);
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("malformed integer '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text)
{
  text = trim(text);
  if (text == "true" || text == "1") {
    return true;
  }
  if (text == "false" || text == "0") {
    return false;
  }
  throw std::invalid_argument("expected true or false, got '" + std::string(text) + "'");
}

std::vector<std::string_view> split_list(std::string_view text)
{
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) {
      out.push_back(item);
    }
    if (comma == std::string_view::npos) {
      break;
    }
    text.remove_prefix(comma + 1);
  }
  return out;
}

double db_to_linear(double db)
{
  return std::pow(10.0, db / 10.0);
}

void require(bool ok, const std::string& message)
{
  if (!ok) {
    throw std::invalid_argument(message);
  }
}

double unit_interval(std::string_view text)
{
  const double v = parse_double(text);
  require(v >= 0.0 && v <= 1.0, "must lie in [0, 1]");
  return v;
}

double positive(std::string_view text)
{
  const double v = parse_double(text);
  require(v > 0.0, "must be positive");
  return v;
}

double non_negative(std::string_view text)
{
  const double v = parse_double(text);
  require(v >= 0.0, "must be non-negative");
  return v;
}

int port_count(std::string_view text)
{
  const int v = parse_integer<int>(text);
  require(v >= 1 && v <= 256, "port count must lie in 1..256");
  return v;
}

std::vector<double> sorted_grid(std::string_view text)
{
  auto grid = expand_grid(text);
  require(!grid.empty(), "grid is empty");
  require(std::is_sorted(grid.begin(), grid.end()), "grid must be sorted");
  return grid;
}

struct State
{
  RunConfig cfg;
};

using Setter = std::function<void(State&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto param = [&](const char* key, double SystemParams::*field, double (*parse)(std::string_view)) {
      t[key] = [field, parse](State& s, std::string_view v) { s.cfg.params.*field = parse(v); };
    };
    param("p_un", &SystemParams::p_un, unit_interval);
    param("p_uf", &SystemParams::p_uf, unit_interval);
    param("mu_c", &SystemParams::mu_c, unit_interval);
    param("mu_s", &SystemParams::mu_s, unit_interval);
    param("zeta", &SystemParams::zeta, unit_interval);
    param("d_b_un", &SystemParams::d_b_un, positive);
    param("d_b_uf", &SystemParams::d_b_uf, positive);
    param("d_b_t", &SystemParams::d_b_t, positive);
    param("d_t_un", &SystemParams::d_t_un, positive);
    param("d_t_uf", &SystemParams::d_t_uf, positive);
    param("abar", &SystemParams::abar, positive);
    param("bbar", &SystemParams::bbar, positive);
    param("cbar", &SystemParams::cbar, positive);
    param("ebar", &SystemParams::ebar, positive);
    t["alpha"] = [](State& s, std::string_view v) {
      s.cfg.params.alpha = parse_double(v);
      require(s.cfg.params.alpha > 2.0, "path-loss exponent must exceed 2");
    };
    auto threshold = [&](const char* key, double SystemParams::*field, double RunConfig::*db) {
      t[key] = [field, db](State& s, std::string_view v) {
        s.cfg.*db = parse_double(v);
        s.cfg.params.*field = db_to_linear(s.cfg.*db);
      };
    };
    threshold("gamma_hat_sic_db", &SystemParams::gamma_hat_sic, &RunConfig::gamma_hat_sic_db);
    threshold("gamma_hat_un_db", &SystemParams::gamma_hat_un, &RunConfig::gamma_hat_un_db);
    threshold("gamma_hat_uf_db", &SystemParams::gamma_hat_uf, &RunConfig::gamma_hat_uf_db);

    t["T"] = [](State& s, std::string_view v) { s.cfg.sensing.T = positive(v); };
    t["beta"] = [](State& s, std::string_view v) {
      s.cfg.sensing.beta = positive(v);
      require(s.cfg.sensing.beta <= 1.0, "duty cycle must not exceed 1");
    };
    t["sigma2_tdf"] = [](State& s, std::string_view v) { s.cfg.sensing.sigma2_tdf = positive(v); };

    for (const char* user : {"near", "far"}) {
      const bool near = std::string_view(user) == "near";
      auto geom = [near](State& s) -> FasGeometry& { return near ? s.cfg.geometry_near : s.cfg.geometry_far; };
      t[std::string(user) + "_n1"] = [geom](State& s, std::string_view v) { geom(s).n1 = port_count(v); };
      t[std::string(user) + "_n2"] = [geom](State& s, std::string_view v) { geom(s).n2 = port_count(v); };
      t[std::string(user) + "_w1"] = [geom](State& s, std::string_view v) { geom(s).w1 = non_negative(v); };
      t[std::string(user) + "_w2"] = [geom](State& s, std::string_view v) { geom(s).w2 = non_negative(v); };
    }

    t["command"] = [](State& s, std::string_view v) {
      s.cfg.command = parse_command(trim(v));
      require(s.cfg.command.has_value(), "unknown command '" + std::string(trim(v)) + "'");
    };
    t["modes"] = [](State& s, std::string_view v) {
      std::vector<BenchmarkMode> modes;
      for (auto item : split_list(v)) {
        modes.push_back(parse_benchmark_mode(item));
      }
      require(!modes.empty(), "mode list is empty");
      s.cfg.modes = modes;
    };
    t["snr_db"] = [](State& s, std::string_view v) { s.cfg.snr_db_grid = sorted_grid(v); };
    t["mu"] = [](State& s, std::string_view v) {
      auto grid = sorted_grid(v);
      require(grid.front() >= 0.0 && grid.back() <= 1.0, "mu values must lie in [0, 1]");
      s.cfg.mu_grid = grid;
    };
    t["tradeoff_snr_db"] = [](State& s, std::string_view v) { s.cfg.tradeoff_snr_db = parse_double(v); };
    t["glq_order"] = [](State& s, std::string_view v) {
      const int m = parse_integer<int>(v);
      require(m >= 1 && m <= kMaxLaguerreOrder, "order must lie in 1.." + std::to_string(kMaxLaguerreOrder));
      s.cfg.quadrature_order = m;
    };
    t["mvn_tol"] = [](State& s, std::string_view v) {
      s.cfg.mvn_tol = positive(v);
      require(s.cfg.mvn_tol < 1.0, "tolerance must be below 1");
    };
    t["pdf"] = [](State& s, std::string_view v) {
      v = trim(v);
      if (v == to_string(PdfModel::CopulaDiagonal)) {
        s.cfg.pdf = PdfModel::CopulaDiagonal;
      } else if (v == to_string(PdfModel::CdfDerivative)) {
        s.cfg.pdf = PdfModel::CdfDerivative;
      } else {
        throw std::invalid_argument("expected copula_diagonal or cdf_derivative");
      }
    };
    t["trials"] = [](State& s, std::string_view v) {
      s.cfg.trials = parse_integer<std::int64_t>(v);
      require(s.cfg.trials >= 0, "must be non-negative");
    };
    t["seed"] = [](State& s, std::string_view v) { s.cfg.seed = parse_integer<std::uint64_t>(v); };
    t["shards"] = [](State& s, std::string_view v) {
      s.cfg.shards = parse_integer<int>(v);
      require(s.cfg.shards >= 1, "must be >= 1");
    };
    t["coherent_mode"] = [](State& s, std::string_view v) { s.cfg.coherent_mode = parse_bool(v); };
    t["workers"] = [](State& s, std::string_view v) {
      s.cfg.workers = parse_integer<int>(v);
      require(s.cfg.workers >= 1, "must be >= 1");
    };
    t["out"] = [](State& s, std::string_view v) { s.cfg.output_path = std::string(trim(v)); };
    // Written into manifests for the reader; ignored on input.
    t["tool_version"] = [](State&, std::string_view) {};
    return t;
  }();
  return table;
}

bool informational(std::string_view key)
{
  return key.starts_with("column.");
}

struct Assignment
{
  std::string key;
  std::string value;
  int line;
  std::string source;
};

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& key, const std::string& message)
    : std::runtime_error(error_text(source, line, key, message)), key_(key), line_(line)
{
}

std::vector<double> expand_grid(std::string_view text)
{
  text = trim(text);
  std::vector<double> out;
  if (text.find(':') == std::string_view::npos) {
    for (auto item : split_list(text)) {
      out.push_back(parse_double(item));
    }
    return out;
  }
  std::vector<double> parts;
  std::string_view rest = text;
  while (true) {
    const auto colon = rest.find(':');
    parts.push_back(parse_double(rest.substr(0, colon)));
    if (colon == std::string_view::npos) {
      break;
    }
    rest.remove_prefix(colon + 1);
  }
  if (parts.size() != 3) {
    throw std::invalid_argument("range must have the form A:B:STEP");
  }
  const double a = parts[0];
  const double b = parts[1];
  const double step = parts[2];
  if (!(step > 0.0) || b < a) {
    throw std::invalid_argument("range needs STEP > 0 and B >= A");
  }
  const auto count = static_cast<std::int64_t>(std::floor((b - a) / step + 1e-9)) + 1;
  if (count > 100000) {
    throw std::invalid_argument("range has too many points");
  }
  for (std::int64_t k = 0; k < count; ++k) {
    // Rounded to 12 significant digits so 0.1-style steps print cleanly.
    double v = a + static_cast<double>(k) * step;
    if (v != 0.0) {
      const double scale = std::pow(10.0, 11 - std::floor(std::log10(std::abs(v))));
      v = std::round(v * scale) / scale;
    }
    out.push_back(v);
  }
  return out;
}

std::string format_number(double value)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

RunConfig parse_config(std::string_view text, const std::string& source, const std::vector<Override>& overrides)
{
  std::vector<Assignment> assignments;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source, line_no, std::string(line), "expected 'key = value'");
    }
    assignments.push_back({std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))),
                           line_no, source});
  }
  for (const auto& o : overrides) {
    assignments.push_back({o.key, o.value, 0, o.origin});
  }

  State state;
  state.cfg.snr_db_grid = expand_grid("0:30:2");
  state.cfg.mu_grid = expand_grid("0:1:0.05");
  std::map<std::string, const Assignment*> last_set;
  for (const auto& a : assignments) {
    if (informational(a.key)) {
      continue;
    }
    const auto it = setters().find(a.key);
    if (it == setters().end()) {
      throw ConfigError(a.source, a.line, a.key, "unknown key");
    }
    try {
      it->second(state, a.value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(a.source, a.line, a.key, e.what());
    }
    last_set[a.key] = &a;
  }

  // Cross-key invariants are reported against the last key of the group
  // that was actually set.
  auto blame = [&](std::initializer_list<const char*> keys) -> const Assignment* {
    const Assignment* found = nullptr;
    for (const char* k : keys) {
      const auto it = last_set.find(k);
      if (it != last_set.end() && (!found || it->second > found)) {
        found = it->second;
      }
    }
    return found;
  };
  auto check_group = [&](bool ok, std::initializer_list<const char*> keys, const std::string& message) {
    if (ok) {
      return;
    }
    const Assignment* a = blame(keys);
    throw ConfigError(a ? a->source : source, a ? a->line : 0, a ? a->key : *keys.begin(), message);
  };
  const SystemParams& p = state.cfg.params;
  check_group(std::abs(p.p_un + p.p_uf - 1.0) <= 1e-12, {"p_un", "p_uf"}, "p_un + p_uf must equal 1");
  check_group(std::abs(p.mu_c + p.mu_s - 1.0) <= 1e-12, {"mu_c", "mu_s"}, "mu_c + mu_s must equal 1");
  try {
    state.cfg.params.validate();
    state.cfg.sensing.validate();
    state.cfg.geometry_near.validate();
    state.cfg.geometry_far.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source, 0, "<resolved>", e.what());
  }

  return state.cfg;
}

std::string render_config(const RunConfig& cfg)
{
  std::ostringstream os;
  auto kv = [&](std::string_view key, const std::string& value) { os << key << " = " << value << "\n"; };
  auto num = [&](std::string_view key, double v) { kv(key, format_number(v)); };
  auto list = [](const std::vector<double>& grid) {
    std::string s;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      s += (i ? "," : "") + format_number(grid[i]);
    }
    return s;
  };

  if (cfg.command) {
    kv("command", std::string(to_string(*cfg.command)));
  }
  const SystemParams& p = cfg.params;
  num("p_un", p.p_un);
  num("p_uf", p.p_uf);
  num("mu_c", p.mu_c);
  num("mu_s", p.mu_s);
  num("zeta", p.zeta);
  num("alpha", p.alpha);
  num("d_b_un", p.d_b_un);
  num("d_b_uf", p.d_b_uf);
  num("d_b_t", p.d_b_t);
  num("d_t_un", p.d_t_un);
  num("d_t_uf", p.d_t_uf);
  num("abar", p.abar);
  num("bbar", p.bbar);
  num("cbar", p.cbar);
  num("ebar", p.ebar);
  num("gamma_hat_sic_db", cfg.gamma_hat_sic_db);
  num("gamma_hat_un_db", cfg.gamma_hat_un_db);
  num("gamma_hat_uf_db", cfg.gamma_hat_uf_db);
  num("T", cfg.sensing.T);
  num("beta", cfg.sensing.beta);
  num("sigma2_tdf", cfg.sensing.sigma2_tdf);
  for (const auto& [name, g] : {std::pair{"near", cfg.geometry_near}, std::pair{"far", cfg.geometry_far}}) {
    kv(std::string(name) + "_n1", std::to_string(g.n1));
    kv(std::string(name) + "_n2", std::to_string(g.n2));
    num(std::string(name) + "_w1", g.w1);
    num(std::string(name) + "_w2", g.w2);
  }
  std::string modes;
  for (std::size_t i = 0; i < cfg.modes.size(); ++i) {
    modes += (i ? "," : "") + std::string(to_string(cfg.modes[i]));
  }
  kv("modes", modes);
  kv("snr_db", list(cfg.snr_db_grid));
  kv("mu", list(cfg.mu_grid));
  num("tradeoff_snr_db", cfg.tradeoff_snr_db);
  kv("glq_order", std::to_string(cfg.quadrature_order));
  num("mvn_tol", cfg.mvn_tol);
  kv("pdf", std::string(to_string(cfg.pdf)));
  kv("trials", std::to_string(cfg.trials));
  kv("seed", std::to_string(cfg.seed));
  kv("shards", std::to_string(cfg.shards));
  kv("coherent_mode", cfg.coherent_mode ? "true" : "false");
  kv("workers", std::to_string(cfg.workers));
  if (!cfg.output_path.empty()) {
    kv("out", cfg.output_path);
  }
  return os.str();
}

}  // namespace fas::cli
