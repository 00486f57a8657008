#include <iostream>
#include <string>
#include <vector>

#include "planar_ot/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return planar_ot::run_cli(args, std::cout, std::cerr);
}
