#include <iostream>
#include <string>
#include <vector>

#include "naesat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return naesat::cli::run(args, std::cout, std::cerr);
}
