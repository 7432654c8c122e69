#include <iostream>
#include <string>
#include <vector>

#include "qdag/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return qdag::cli::run(args, std::cin, std::cout, std::cerr);
}
