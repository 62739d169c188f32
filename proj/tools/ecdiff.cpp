#include "ecdiff/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
  std::vector<std::string> Args(argv + 1, argv + argc);
  return ecdiff::runCli(Args, std::cout, std::cerr);
}
