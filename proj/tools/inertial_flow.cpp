#include <iostream>
#include <string>
#include <vector>

#include "inertial_flow/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return inertial_flow::run_cli(args, std::cout, std::cerr);
}
