#include "kramers/error.hpp"
#include "kramers/version.hpp"
#include "kramers_cli/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace kramers;
using namespace kramers::cli;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = main_entry(args, out, err);
  return {status, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("kramers_test_cli_" + name);
}

// the last nonempty line of stderr
nlohmann::json last_record(const std::string& err) {
  std::istringstream in(err);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  return nlohmann::json::parse(last);
}

}  // namespace

TEST_CASE("geometric and list grids") {
  const auto up = parse_grid("2:4096:x2");
  REQUIRE(up.size() == 12);
  CHECK(up.front() == 2.0);
  CHECK(up.back() == 4096.0);

  const auto down = parse_grid("0.2:0.025:x0.5");
  REQUIRE(down.size() == 4);
  CHECK(down[3] == doctest::Approx(0.025));
  for (std::size_t i = 1; i < down.size(); ++i) CHECK(down[i] < down[i - 1]);

  const auto list = parse_grid(" 0.1, 0.07 ,0.05");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 0.07);

  CHECK(parse_int_grid("1:32:x2") == std::vector<int>{1, 2, 4, 8, 16, 32});

  for (const char* bad : {"", "1,,2", "1:2", "1:8:2", "1:8:x0.5", "8:1:x2", "0:8:x2", "1:8:x1", "a,b", "1:8:x"})
    CHECK_THROWS_AS(parse_grid(bad), InvalidArgument);
  CHECK_THROWS_AS(parse_int_grid("1.5,2"), InvalidArgument);
  CHECK_THROWS_AS(parse_int_grid("0,2"), InvalidArgument);
}

TEST_CASE("parameter tables") {
  for (Command c : all_commands()) {
    CHECK(parse_command(to_string(c)) == c);
    bool has_seed = false;
    for (const ParameterInfo& p : parameters_for(c)) has_seed = has_seed || p.name == "seed";
    CHECK(has_seed);
  }
  CHECK_THROWS_AS(parse_command("nope"), InvalidArgument);
  CHECK(parse_output_format("csv") == OutputFormat::csv);
  CHECK_THROWS_AS(parse_output_format("xml"), InvalidArgument);

  const RunSpec spec = resolve(Command::model, {{"n", "8"}});
  CHECK(spec.parameters.at("n") == "8");
  CHECK(spec.parameters.at("mu") == "2");
  CHECK_THROWS_AS(resolve(Command::model, {{"alpha", "0.6"}}), InvalidArgument);
}

TEST_CASE("config files") {
  const auto path = temp_file("config.txt");
  {
    std::ofstream f(path);
    f << "# comment\n"
      << "n = 3\n"
      << "--mu=2.5   # trailing\n"
      << "\n";
  }
  const auto entries = read_config(path.string());
  CHECK(entries.size() == 2);
  CHECK(entries.at("n") == "3");
  CHECK(entries.at("mu") == "2.5");

  // flags win over the file
  const Result r = call({"--config", path.string(), "model", "--n", "2", "--format", "json"});
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  std::map<std::string, std::string> manifest;
  for (const auto& e : doc["manifest"]) manifest[e["key"]] = e["value"];
  CHECK(manifest["n"] == "2");
  CHECK(manifest["mu"] == "2.5");

  {
    std::ofstream f(path);
    f << "n 3\n";
  }
  CHECK_THROWS_AS(read_config(path.string()), InvalidArgument);
  std::filesystem::remove(path);
}

TEST_CASE("exit codes and error records") {
  const Result ok = call({"prefactor", "--n-grid", "2,4", "--format", "csv"});
  CHECK(ok.status == 0);
  CHECK(ok.out.rfind("N,pN,limit,gap\r\n", 0) == 0);

  const Result unknown = call({"model", "--bogus", "1"});
  CHECK(unknown.status == 2);
  CHECK(last_record(unknown.err)["error"]["status"] == 2);

  const Result bad = call({"model", "--n", "0"});
  CHECK(bad.status == 2);
  CHECK(last_record(bad.err)["error"]["kind"] == "invalid_argument");

  const Result none = call({});
  CHECK(none.status == 2);

  const Result pre = call({"convexify", "--alpha", "0.3", "--n-grid", "1", "--sweep-points", "100",
                           "--samples", "10"});
  CHECK(pre.status == 4);
  CHECK(last_record(pre.err)["error"]["kind"] == "precondition");
  CHECK(last_record(pre.err)["error"]["command"] == "convexify");

  const Result version = call({"--version"});
  CHECK(version.status == 0);
  CHECK(version.out.find(kVersion) != std::string::npos);
}

TEST_CASE("JSON output structure") {
  const Result r = call({"model", "--n", "4", "--format", "json"});
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc.contains("manifest"));
  REQUIRE(doc.contains("results"));
  const auto& m = doc["manifest"];
  REQUIRE(m.size() >= 3);
  CHECK(m[0]["key"] == "command");
  CHECK(m[0]["value"] == "model");
  CHECK(m[1]["key"] == "version");
  CHECK(m[1]["value"] == kVersion);
  bool has_seed = false;
  for (const auto& e : m) {
    CHECK(e["value"].is_string());
    has_seed = has_seed || e["key"] == "seed";
  }
  CHECK(has_seed);
  CHECK(doc["results"].is_array());
  CHECK(!doc["results"].empty());
  for (const auto& row : doc["results"]) CHECK(row.is_object());

  std::ifstream schema_file(KRAMERS_SCHEMA_PATH);
  REQUIRE(schema_file);
  const auto schema = nlohmann::json::parse(schema_file);
  for (const auto& key : schema["required"]) CHECK(doc.contains(key.get<std::string>()));
}

TEST_CASE("manifest re-run is bit identical") {
  const auto out_path = temp_file("prefactor.json");
  const auto rerun_path = temp_file("prefactor_rerun.json");
  REQUIRE(call({"prefactor", "--n-grid", "2:64:x2", "--mu", "2.5", "--out", out_path.string()}).status == 0);
  REQUIRE(call({"--from-manifest", out_path.string(), "--out", rerun_path.string()}).status == 0);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string first = slurp(out_path);
  CHECK(!first.empty());
  CHECK(first == slurp(rerun_path));

  const RunSpec spec = spec_from_manifest(first);
  CHECK(spec.command == Command::prefactor);
  CHECK(spec.parameters.at("mu") == "2.5");
  CHECK(spec.parameters.at("n-grid") == "2:64:x2");
  CHECK(spec_from_manifest(manifest_json(spec)).parameters == spec.parameters);

  // CSV keeps its manifest beside the file
  const auto csv_path = temp_file("prefactor.csv");
  REQUIRE(call({"prefactor", "--n-grid", "2,4", "--out", csv_path.string()}).status == 0);
  auto side = csv_path;
  side += ".manifest.json";
  CHECK(std::filesystem::exists(side));
  for (const auto& p : {out_path, rerun_path, csv_path, side}) std::filesystem::remove(p);
}
