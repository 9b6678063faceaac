#include <iostream>

#include "yule/cli_io.hpp"

int main(int argc, char** argv) {
  return yule::cli::main_entry(argc, argv, std::cout, std::cerr);
}
