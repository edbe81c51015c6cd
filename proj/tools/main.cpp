#include <iostream>

#include "conic_alm/cli.hpp"

int main(int argc, char** argv) { return conic_alm::cli::run(argc, argv, std::cout, std::cerr); }
