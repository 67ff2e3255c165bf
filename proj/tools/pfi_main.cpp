#include <iostream>
#include <string>
#include <vector>

#include "pfi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pfi::cli::run(args, std::cout, std::cerr);
}
