#include <iostream>
#include <string>
#include <vector>

#include "baycount/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return baycount::run_cli(args, std::cout, std::cerr);
}
