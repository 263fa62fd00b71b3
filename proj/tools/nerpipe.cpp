#include <iostream>
#include <string>
#include <vector>

#include "nerpipe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return nerpipe::cli::run(args, std::cout, std::cerr);
}
