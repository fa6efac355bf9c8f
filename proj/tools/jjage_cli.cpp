#include <iostream>
#include <string>
#include <vector>

#include "jjage/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return jjage::cli::run(args, std::cout, std::cerr);
}
