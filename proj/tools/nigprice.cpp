#include "nig/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return nig::cli::run(argc, argv, std::cout, std::cerr); }
