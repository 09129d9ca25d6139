#include <iostream>
#include <string>
#include <vector>

#include "entmono/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return entmono::cli::main(args, std::cout, std::cerr);
}
