#include <iostream>
#include <string>
#include <vector>

#include "lossperc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return lossperc::run_cli(args, std::cout, std::cerr);
}
