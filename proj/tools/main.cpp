#include "steklame/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return steklame::cli::run(argc, argv, std::cout, std::cerr);
}
