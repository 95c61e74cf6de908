#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace kramers::cli {

// monostate is an absent value: empty CSV field, JSON null.
using Cell = std::variant<std::monostate, double, long long, bool, std::string, std::vector<double>>;

struct Row {
  std::vector<std::pair<std::string, Cell>> cells;

  Row& add(std::string key, Cell value) {
    cells.emplace_back(std::move(key), std::move(value));
    return *this;
  }
};

struct Table {
  std::vector<Row> rows;
};

// RFC 4180 with a header row. Vector cells expand to name_0, name_1, ...
// sized by the first row. Doubles use the shortest round-trip form.
void write_csv(const Table& table, std::ostream& out);

// {"manifest": [...], "results": [...]}; manifest is already serialized JSON.
void write_json(const Table& table, const std::string& manifest, std::ostream& out);

std::string format_double(double value);

}  // namespace kramers::cli
