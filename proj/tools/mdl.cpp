#include <iostream>

#include "mdl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mdl::cli::run(args, std::cin, std::cout, std::cerr);
}
