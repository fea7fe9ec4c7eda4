#include <iostream>
#include <string>
#include <vector>

#include "bdmix_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bdmix::cli::run(args, std::cout, std::cerr);
}
