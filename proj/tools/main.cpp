#include <iostream>

#include "cli_commands.hpp"

int main(int argc, char** argv) {
  return christoffel::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
