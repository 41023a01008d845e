#include <iostream>

#include "hadfix/cli.hpp"

int main(int argc, char** argv) { return hadfix::cli::main(argc, argv, std::cout, std::cerr); }
