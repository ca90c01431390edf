#include <iostream>
#include <string>
#include <vector>

#include "ghyp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ghyp::run_cli(args, std::cout, std::cerr);
}
