#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kramers::cli {

enum class Command { model, prefactor, partition, quasimode, spectrum, convexify, simulate };

std::string_view to_string(Command command);
Command parse_command(std::string_view text);
std::span<const Command> all_commands();

enum class OutputFormat { csv, json };

std::string_view to_string(OutputFormat format);
OutputFormat parse_output_format(std::string_view text);

struct ParameterInfo {
  std::string_view name;
  std::string_view default_value;
  std::string_view help;
};

/// Parameters accepted by a command, in manifest order. Every command takes
/// `seed`, whether or not it draws random numbers.
std::span<const ParameterInfo> parameters_for(Command command);

/// One invocation. `parameters` holds the raw text of every accepted key once
/// resolved; an empty output path means standard output.
struct RunSpec {
  Command command = Command::model;
  std::map<std::string, std::string> parameters;
  std::string output_path;
  OutputFormat output_format = OutputFormat::json;
};

/// Fills defaults under `given` and rejects keys the command does not know.
RunSpec resolve(Command command, const std::map<std::string, std::string>& given);

/// `a,b,c` or the geometric form `a:b:xk` (k may be below 1 for a
/// decreasing sweep; the last value never passes b).
std::vector<double> parse_grid(std::string_view text);
std::vector<int> parse_int_grid(std::string_view text);

/// Plain `key = value` lines; `#` starts a comment.
std::map<std::string, std::string> read_config(const std::string& path);

/// Writes results and manifest. Exit status 0, or 2/3/4 for invalid input,
/// numerical failure and a precondition flag; failures also print a JSON
/// error record on `err`. `out` receives results when no output path is set.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// Manifest entries as a JSON array text, and the inverse used by
/// --from-manifest (accepts a bare manifest file or a full JSON result).
std::string manifest_json(const RunSpec& spec);
RunSpec spec_from_manifest(const std::string& json_text);

/// Full command line: subcommand, flags, --config, --from-manifest, --threads.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kramers::cli
