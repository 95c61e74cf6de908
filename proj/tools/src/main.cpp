#include "kramers_cli/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return kramers::cli::main_entry(args, std::cout, std::cerr);
}
