#include <iostream>

#include "sphcov/cli.hpp"

int main(int argc, char** argv) { return sphcov::main_entry(argc, argv, std::cout, std::cerr); }
