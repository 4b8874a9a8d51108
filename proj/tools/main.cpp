#include "sketchreg/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sketchreg::run_cli(argc, argv, std::cout, std::cerr); }
