#include <iostream>

#include "poisson_couple/cli.hpp"

int main(int argc, char** argv) { return pcouple::cli::run(argc, argv, std::cout, std::cerr); }
