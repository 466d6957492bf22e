#include <iostream>
#include <string>
#include <vector>

#include "scenario/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return scenario::cli::run_cli(std::move(args), std::cout, std::cerr);
}
