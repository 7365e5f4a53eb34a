#include <iostream>

#include "pubbench/cli/cli.hpp"

int main(int argc, char** argv) { return pubbench::cli::run_cli(argc, argv, std::cout, std::cerr); }
