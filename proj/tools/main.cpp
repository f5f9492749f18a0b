#include <iostream>

#include "archner/cli.hpp"

int main(int argc, char** argv) {
  return archner::cli::run(argc, argv, std::cout, std::cerr);
}
