#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return pyramid::cli::run(argc, argv, std::cout, std::cerr); }
