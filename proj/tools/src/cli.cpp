#include "kramers_cli/cli.hpp"

#include "commands.hpp"
#include "kramers/error.hpp"
#include "kramers/parallel.hpp"
#include "kramers/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace kramers::cli {
namespace {

void write_error(std::ostream& err, int status, std::string_view kind, std::string_view message,
                 std::string_view command = {}) {
  nlohmann::ordered_json record;
  record["error"]["status"] = status;
  record["error"]["kind"] = kind;
  if (!command.empty()) record["error"]["command"] = command;
  record["error"]["message"] = message;
  err << record.dump() << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_results(const RunSpec& spec, const Outcome& outcome, const std::string& raw, std::ostream& out,
                   std::ostream& err) {
  const std::string manifest = manifest_json(spec);
  std::ofstream file;
  if (!spec.output_path.empty()) {
    file.open(spec.output_path, std::ios::binary);
    if (!file) throw InvalidArgument("cannot write " + spec.output_path);
  }
  std::ostream& target = spec.output_path.empty() ? out : file;

  if (spec.output_format == OutputFormat::json) {
    write_json(outcome.table, manifest, target);
  } else {
    if (!raw.empty())
      target << raw;
    else
      write_csv(outcome.table, target);
    // CSV has no room for the manifest; it goes next to the file, or to the
    // error stream when results go to standard output.
    const std::string record = "{\"manifest\":" + manifest + "}\n";
    if (spec.output_path.empty()) {
      err << record;
    } else {
      std::ofstream side(spec.output_path + ".manifest.json", std::ios::binary);
      if (!side) throw InvalidArgument("cannot write " + spec.output_path + ".manifest.json");
      side << record;
    }
  }
  target.flush();
  if (!target) throw NumericalFailure("failed writing results");
}

std::string_view describe(Command c) {
  switch (c) {
    case Command::model: return "critical points, energies and Hessian spectra";
    case Command::prefactor: return "Eyring-Kramers prefactor p(N) against its large-N limit";
    case Command::partition: return "partition function against its Laplace asymptotics";
    case Command::quasimode: return "Dirichlet form and E-functional of the erf quasimode";
    case Command::spectrum: return "low spectrum of the Witten Laplacian on a grid (N <= 2)";
    case Command::convexify: return "Hessian floor of the convexified energy and log-Sobolev bound";
    case Command::simulate: return "Euler-Maruyama runs: gap, transition times, histogram, trajectory";
  }
  return {};
}

bool is_global_key(const std::string& key) {
  return key == "out" || key == "format" || key == "threads";
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const std::string_view command = to_string(spec.command);
  try {
    std::string raw;
    const Outcome outcome = execute(spec, raw);
    write_results(spec, outcome, raw, out, err);
    if (outcome.status != 0) write_error(err, outcome.status, outcome.kind, outcome.message, command);
    return outcome.status;
  } catch (const InvalidArgument& e) {
    write_error(err, 2, "invalid_argument", e.what(), command);
    return 2;
  } catch (const NumericalFailure& e) {
    write_error(err, 3, "numerical_failure", e.what(), command);
    return 3;
  } catch (const PreconditionViolation& e) {
    write_error(err, 4, "precondition", e.what(), command);
    return 4;
  } catch (const std::exception& e) {
    write_error(err, 3, "numerical_failure", e.what(), command);
    return 3;
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metastability toolkit for a periodic ring of double-well particles.", "kramers_ring"};
  // -h stays free: --h is the temperature.
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string out_path;
  std::string format;
  std::string manifest_path;
  unsigned threads = 0;
  app.add_option("--config", config_path, "key = value file merged under explicit flags");
  app.add_option("--out", out_path, "output file (default: standard output)");
  app.add_option("--format", format, "csv or json (default: from --out extension, else json)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "worker pool size; KRAMERS_RING_THREADS takes precedence");
  app.add_option("--from-manifest", manifest_path, "re-run the parameters recorded in a manifest or JSON result");

  std::map<Command, std::map<std::string, std::string>> storage;
  std::map<Command, CLI::App*> subcommands;
  for (Command c : all_commands()) {
    CLI::App* sub = app.add_subcommand(std::string(to_string(c)), std::string(describe(c)));
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->fallthrough();
    for (const ParameterInfo& p : parameters_for(c)) {
      std::string& slot = storage[c][std::string(p.name)];
      sub->add_option("--" + std::string(p.name), slot, std::string(p.help))
          ->default_str(std::string(p.default_value));
    }
    subcommands[c] = sub;
  }

  std::vector<const char*> argv{"kramers_ring"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    write_error(err, 2, "invalid_argument", e.what());
    return 2;
  }

  try {
    std::optional<Command> chosen;
    for (const auto& [c, sub] : subcommands)
      if (sub->parsed()) chosen = c;

    std::map<std::string, std::string> config;
    if (!config_path.empty()) config = read_config(config_path);
    auto global = [&](const std::string& key, std::string& value) {
      const auto it = config.find(key);
      if (value.empty() && it != config.end()) value = it->second;
    };
    global("out", out_path);
    global("format", format);
    if (threads == 0 && config.count("threads")) threads = static_cast<unsigned>(std::stoul(config["threads"]));

    RunSpec spec;
    if (!manifest_path.empty()) {
      spec = spec_from_manifest(read_file(manifest_path));
      if (chosen && *chosen != spec.command)
        throw InvalidArgument("subcommand " + std::string(to_string(*chosen)) + " does not match the manifest");
      chosen = spec.command;
    } else if (!chosen) {
      err << app.help();
      write_error(err, 2, "invalid_argument", "a command is required");
      return 2;
    }

    std::map<std::string, std::string> given = manifest_path.empty() ? std::map<std::string, std::string>{}
                                                                      : spec.parameters;
    for (const auto& [key, value] : config)
      if (!is_global_key(key)) given[key] = value;
    CLI::App* sub = subcommands[*chosen];
    for (const ParameterInfo& p : parameters_for(*chosen)) {
      const std::string name(p.name);
      if (sub->count("--" + name) > 0) given[name] = storage[*chosen][name];
    }
    spec = resolve(*chosen, given);
    spec.output_path = out_path;
    if (!format.empty())
      spec.output_format = parse_output_format(format);
    else if (out_path.size() >= 4 && out_path.compare(out_path.size() - 4, 4, ".csv") == 0)
      spec.output_format = OutputFormat::csv;
    else
      spec.output_format = OutputFormat::json;

    const char* env = std::getenv("KRAMERS_RING_THREADS");
    if ((env == nullptr || *env == '\0') && threads > 0) set_thread_count(threads);

    return run(spec, out, err);
  } catch (const InvalidArgument& e) {
    write_error(err, 2, "invalid_argument", e.what());
    return 2;
  } catch (const std::exception& e) {
    write_error(err, 2, "invalid_argument", e.what());
    return 2;
  }
}

}  // namespace kramers::cli
