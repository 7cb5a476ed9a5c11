#include <iostream>

#include "niplab/cli.hpp"

int main(int argc, char** argv) { return niplab::cli::run(argc, argv, std::cout, std::cerr); }
