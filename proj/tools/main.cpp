#include <iostream>

#include "cli/cli.hpp"

int main(int argc, char** argv) { return l0acc::cli::run(argc, argv, std::cout, std::cerr); }
