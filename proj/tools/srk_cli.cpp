#include <iostream>

#include "srk/cli.hpp"

int main(int argc, char** argv) { return srk::cli::main(argc, argv, std::cout, std::cerr); }
