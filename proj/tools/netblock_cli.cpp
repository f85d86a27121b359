#include <iostream>
#include <string>
#include <vector>

#include "netblock/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return netblock::cli::run(args, std::cout, std::cerr);
}
