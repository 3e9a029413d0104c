#include <iostream>

#include "selfgraft/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return selfgraft::run_cli(args, std::cout, std::cerr);
}
