#include <iostream>
#include <string>
#include <vector>

#include "vrpweave/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vrp::cli::run(std::move(args), std::cout, std::cerr);
}
