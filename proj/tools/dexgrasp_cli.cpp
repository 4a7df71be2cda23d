#include "dexgrasp/harness/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return dexgrasp::harness::run_cli(argc, argv, std::cout, std::cerr); }
