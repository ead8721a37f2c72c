#include <iostream>

#include "isic/cli.hpp"

int main(int argc, char** argv) {
  return isic::cli::run(argc, argv, std::cout, std::cerr);
}
