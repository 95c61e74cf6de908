#pragma once

#include "kramers_cli/cli.hpp"
#include "table.hpp"

#include <string>

namespace kramers::cli {

// Results of one command. A nonzero status keeps the table (it is still
// written) and adds an error record: 3 numerical failure, 4 precondition flag.
struct Outcome {
  Table table;
  int status = 0;
  std::string kind;
  std::string message;
};

// Commands that stream their own CSV (trajectories) fill `raw_csv` instead of
// the table.
Outcome execute(const RunSpec& spec, std::string& raw_csv);

}  // namespace kramers::cli
