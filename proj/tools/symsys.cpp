#include <iostream>

#include "symsys/harness/cli.hpp"

int main(int argc, char** argv) { return symsys::run_cli(argc, argv, std::cout, std::cerr); }
