#include "kramers_cli/cli.hpp"

#include "kramers/error.hpp"
#include "kramers/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>

namespace kramers::cli {
namespace {

constexpr std::array kCommands = {Command::model,     Command::prefactor, Command::partition, Command::quasimode,
                                  Command::spectrum,  Command::convexify, Command::simulate};

constexpr std::string_view kSweepH = "0.2,0.1,0.05,0.025";

constexpr std::array<ParameterInfo, 4> kModel = {{
    {"n", "4", "particle count N"},
    {"mu", "2", "coupling mu > 1"},
    {"h", "0.1", "temperature h"},
    {"seed", "1", "random seed (unused)"},
}};

constexpr std::array<ParameterInfo, 3> kPrefactor = {{
    {"mu", "2", "coupling mu > 1"},
    {"n-grid", "2:4096:x2", "particle counts"},
    {"seed", "1", "random seed (unused)"},
}};

constexpr std::array<ParameterInfo, 11> kPartition = {{
    {"n", "1", "particle count N"},
    {"mu", "2", "coupling mu > 1"},
    {"h-grid", kSweepH, "temperatures"},
    {"method", "quadrature", "quadrature (N <= 2) or mc (N <= 12)"},
    {"r", "0", "0 integrates the full Z; r > 0 the well {|xbar -/+ 1| <= r}"},
    {"around", "i_plus", "well for r > 0: i_plus or i_minus"},
    {"rel-tol", "1e-10", "quadrature relative tolerance"},
    {"samples", "1000000", "Monte Carlo samples"},
    {"batches", "20", "Monte Carlo batches for the standard error"},
    {"seed", "1", "random seed"},
    {"fit", "true", "add the epsilon ~ C h fit columns"},
}};

constexpr std::array<ParameterInfo, 9> kQuasimode = {{
    {"n", "1", "particle count N"},
    {"mu", "2", "coupling mu > 1"},
    {"h-grid", kSweepH, "temperatures"},
    {"method", "quadrature", "quadrature (N <= 2) or mc (N <= 12)"},
    {"delta", "0", "second gap for the sandwich lower bound; 0 skips it"},
    {"rel-tol", "1e-10", "quadrature relative tolerance"},
    {"samples", "1000000", "Monte Carlo samples"},
    {"batches", "20", "Monte Carlo batches for the standard error"},
    {"seed", "1", "random seed"},
}};

constexpr std::array<ParameterInfo, 10> kSpectrum = {{
    {"n", "1", "particle count N (1 or 2)"},
    {"mu", "2", "coupling mu > 1"},
    {"h-grid", "0.1,0.07,0.05", "temperatures"},
    {"m", "4", "eigenvalues per solve"},
    {"grid", "auto", "nodes per coordinate"},
    {"half-width", "auto", "box half width"},
    {"discretization", "factored", "factored or pointwise"},
    {"solver", "lanczos", "lanczos or dense (N = 1)"},
    {"certify", "true", "repeat each solve on the doubled grid"},
    {"seed", "1", "random seed (unused)"},
}};

constexpr std::array<ParameterInfo, 10> kConvexify = {{
    {"alpha", "0.6", "quartic weight kept by the perturbation"},
    {"beta", "0.1", "target Hessian floor"},
    {"cutoff-n", "100", "cutoff order n"},
    {"mu", "2", "coupling mu > 1"},
    {"n-grid", "1,2,4,8,16,32", "ring sizes for the sampled Hessian sweep"},
    {"samples", "1000", "random Hessians per ring size"},
    {"sweep-points", "100000", "points of the coordinate sweep"},
    {"delta", "0.1", "second gap used for the log-Sobolev bound"},
    {"h-grid", "0.1,0.07,0.05", "temperatures for the log-Sobolev bound"},
    {"seed", "11", "random seed"},
}};

constexpr std::array<ParameterInfo, 18> kSimulate = {{
    {"n", "4", "particle count N"},
    {"mu", "2", "coupling mu > 1"},
    {"h", "0.3", "temperature h"},
    {"dt", "auto", "time step; auto applies the stability bound"},
    {"t", "10000", "total time per replica"},
    {"replicas", "16", "independent replicas"},
    {"seed", "7", "random seed"},
    {"mode", "gap", "gap, transition, histogram or trajectory"},
    {"burn-in", "auto", "discarded initial time; auto is 5% of t"},
    {"lag-min", "auto", "smallest fitted lag; auto is min(2, lag-max/4)"},
    {"lag-max", "auto", "largest fitted lag; auto is 1/prediction"},
    {"radius", "0.3", "target ball radius around I_- (transition)"},
    {"init", "i_plus", "i_plus or i_minus"},
    {"bins", "60", "histogram bins"},
    {"range", "2", "histogram half range"},
    {"thin", "100", "trajectory thinning in steps"},
    {"replica", "0", "replica written by mode=trajectory"},
    {"deterministic", "false", "drop the noise term"},
}};

bool parse_number(std::string_view text, double& value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::model: return "model";
    case Command::prefactor: return "prefactor";
    case Command::partition: return "partition";
    case Command::quasimode: return "quasimode";
    case Command::spectrum: return "spectrum";
    case Command::convexify: return "convexify";
    case Command::simulate: return "simulate";
  }
  return "?";
}

Command parse_command(std::string_view text) {
  for (Command c : kCommands)
    if (to_string(c) == text) return c;
  throw InvalidArgument("unknown command '" + std::string(text) + "'");
}

std::span<const Command> all_commands() { return kCommands; }

std::string_view to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw InvalidArgument("format must be csv or json, got '" + std::string(text) + "'");
}

std::span<const ParameterInfo> parameters_for(Command command) {
  switch (command) {
    case Command::model: return kModel;
    case Command::prefactor: return kPrefactor;
    case Command::partition: return kPartition;
    case Command::quasimode: return kQuasimode;
    case Command::spectrum: return kSpectrum;
    case Command::convexify: return kConvexify;
    case Command::simulate: return kSimulate;
  }
  return {};
}

RunSpec resolve(Command command, const std::map<std::string, std::string>& given) {
  RunSpec spec;
  spec.command = command;
  std::set<std::string> known;
  for (const ParameterInfo& p : parameters_for(command)) {
    known.emplace(p.name);
    spec.parameters.emplace(std::string(p.name), std::string(p.default_value));
  }
  for (const auto& [key, value] : given) {
    if (!known.count(key))
      throw InvalidArgument("unknown parameter '" + key + "' for command " + std::string(to_string(command)));
    spec.parameters[key] = value;
  }
  return spec;
}

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw InvalidArgument("empty grid");
  std::vector<double> values;

  if (text.find(':') != std::string_view::npos) {
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (second == std::string_view::npos || text.size() <= second + 2 || text[second + 1] != 'x')
      throw InvalidArgument("geometric grid must read a:b:xk, got '" + std::string(text) + "'");
    double a = 0, b = 0, k = 0;
    if (!parse_number(trim(text.substr(0, first)), a) ||
        !parse_number(trim(text.substr(first + 1, second - first - 1)), b) ||
        !parse_number(trim(text.substr(second + 2)), k))
      throw InvalidArgument("malformed geometric grid '" + std::string(text) + "'");
    if (!(a > 0) || !(b > 0) || !(k > 0) || k == 1.0 || !std::isfinite(k))
      throw InvalidArgument("geometric grid needs a, b > 0 and k > 0, k != 1");
    if ((b > a && k < 1) || (b < a && k > 1))
      throw InvalidArgument("geometric grid ratio points away from the end value");
    const double slack = 1e-12 * std::max(a, b);
    for (double v = a; k > 1 ? v <= b + slack : v >= b - slack; v *= k) {
      values.push_back(v);
      if (values.size() > 100000) throw InvalidArgument("geometric grid too long");
    }
    return values;
  }

  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start));
    double v = 0;
    if (!parse_number(piece, v) || !std::isfinite(v))
      throw InvalidArgument("malformed grid entry '" + std::string(piece) + "'");
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return values;
}

std::vector<int> parse_int_grid(std::string_view text) {
  std::vector<int> out;
  for (double v : parse_grid(text)) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)) || r < 1 || r > 1e9)
      throw InvalidArgument("integer grid entry expected, got " + std::to_string(v));
    out.push_back(static_cast<int>(r));
  }
  return out;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  std::map<std::string, std::string> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw InvalidArgument(path + ":" + std::to_string(number) + ": expected key = value");
    std::string key(trim(view.substr(0, eq)));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw InvalidArgument(path + ":" + std::to_string(number) + ": empty key");
    entries[key] = std::string(trim(view.substr(eq + 1)));
  }
  return entries;
}

std::string manifest_json(const RunSpec& spec) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  auto push = [&](std::string_view key, const std::string& value) {
    entries.push_back({{"key", key}, {"value", value}});
  };
  push("command", std::string(to_string(spec.command)));
  push("version", kVersion);
  for (const ParameterInfo& p : parameters_for(spec.command)) {
    const auto it = spec.parameters.find(std::string(p.name));
    push(p.name, it == spec.parameters.end() ? std::string(p.default_value) : it->second);
  }
  return entries.dump();
}

RunSpec spec_from_manifest(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("manifest is not valid JSON: ") + e.what());
  }
  const nlohmann::json& entries = doc.is_object() && doc.contains("manifest") ? doc["manifest"] : doc;
  if (!entries.is_array()) throw InvalidArgument("manifest must be an array of {key, value} entries");

  std::optional<Command> command;
  std::map<std::string, std::string> given;
  for (const auto& entry : entries) {
    if (!entry.is_object() || !entry.contains("key") || !entry.contains("value") || !entry["key"].is_string() ||
        !entry["value"].is_string())
      throw InvalidArgument("manifest entries must be {\"key\": string, \"value\": string}");
    const std::string key = entry["key"];
    const std::string value = entry["value"];
    if (key == "command")
      command = parse_command(value);
    else if (key != "version")
      given[key] = value;
  }
  if (!command) throw InvalidArgument("manifest has no command entry");
  return resolve(*command, given);
}

}  // namespace kramers::cli
