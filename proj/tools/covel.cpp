#include <iostream>
#include <string>
#include <vector>

#include "covel/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return covel::run_cli(args, std::cout, std::cerr);
}
