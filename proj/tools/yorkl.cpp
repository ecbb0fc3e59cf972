#include <iostream>

#include "yorkl_cli.hpp"

int main(int argc, char** argv) { return yorkl::cli::run_cli(argc, argv, std::cout, std::cerr); }
