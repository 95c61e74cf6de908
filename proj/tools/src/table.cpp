#include "table.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>

namespace kramers::cli {
namespace {

std::string quote_csv(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

struct CsvField {
  std::string operator()(std::monostate) const { return {}; }
  std::string operator()(double v) const { return format_double(v); }
  std::string operator()(long long v) const { return std::to_string(v); }
  std::string operator()(bool v) const { return v ? "true" : "false"; }
  std::string operator()(const std::string& v) const { return quote_csv(v); }
  std::string operator()(const std::vector<double>&) const { return {}; }
};

nlohmann::ordered_json to_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      cell);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

void write_csv(const Table& table, std::ostream& out) {
  if (table.rows.empty()) return;
  const Row& first = table.rows.front();

  std::vector<std::size_t> widths;
  bool lead = true;
  for (const auto& [key, cell] : first.cells) {
    const auto* vec = std::get_if<std::vector<double>>(&cell);
    widths.push_back(vec ? vec->size() : 0);
    if (vec) {
      for (std::size_t i = 0; i < vec->size(); ++i) {
        out << (lead ? "" : ",") << quote_csv(key + "_" + std::to_string(i));
        lead = false;
      }
    } else {
      out << (lead ? "" : ",") << quote_csv(key);
      lead = false;
    }
  }
  out << "\r\n";

  for (const Row& row : table.rows) {
    lead = true;
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      const Cell& cell = row.cells[c].second;
      if (const auto* vec = std::get_if<std::vector<double>>(&cell)) {
        for (std::size_t i = 0; i < widths[c]; ++i) {
          out << (lead ? "" : ",") << (i < vec->size() ? format_double((*vec)[i]) : "");
          lead = false;
        }
      } else {
        out << (lead ? "" : ",") << std::visit(CsvField{}, cell);
        lead = false;
      }
    }
    out << "\r\n";
  }
}

void write_json(const Table& table, const std::string& manifest, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["manifest"] = nlohmann::ordered_json::parse(manifest);
  doc["results"] = nlohmann::ordered_json::array();
  for (const Row& row : table.rows) {
    nlohmann::ordered_json object = nlohmann::ordered_json::object();
    for (const auto& [key, cell] : row.cells) object[key] = to_json(cell);
    doc["results"].push_back(std::move(object));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace kramers::cli
