#include <iostream>

#include "augcl/cli.hpp"

int main(int argc, char** argv) { return augcl::run_cli(argc, argv, std::cout, std::cerr); }
