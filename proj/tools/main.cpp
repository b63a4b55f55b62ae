#include <iostream>
#include <string>
#include <vector>

#include "moneychain/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return moneychain::cli::run(args, std::cout, std::cerr);
}
