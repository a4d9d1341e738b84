#include <iostream>

#include "ratelens/cli.hpp"

int main(int argc, char** argv) {
  return ratelens::cli::run(argc, argv, std::cout, std::cerr);
}
