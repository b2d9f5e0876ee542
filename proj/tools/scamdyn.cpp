#include <iostream>

#include "scamdyn/cli.hpp"

int main(int argc, char** argv) {
  return scamdyn::cli::run(argc, argv, std::cout, std::cerr);
}
