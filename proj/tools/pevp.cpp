#include <iostream>

#include "pevp/cli.hpp"

int main(int argc, char** argv) { return pevp::cli::run(argc, argv, std::cout, std::cerr); }
