#include <iostream>
#include <string>
#include <vector>

#include "ifs_cuntz/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ifs_cuntz::cli::run(std::move(args), std::cout, std::cerr);
}
