#include <iostream>

#include "dynrank/cli.hpp"

int main(int argc, char** argv) {
  return dynrank::cli::run(argc, argv, std::cout, std::cerr);
}
