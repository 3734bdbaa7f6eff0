#include <iostream>

#include "asmcat/cli.hpp"

int main(int argc, char** argv) {
  return asmcat::run_cli(argc, argv, std::cout, std::cerr);
}
