#include <iostream>

#include "patchxfer/cli.hpp"

int main(int argc, char** argv) { return patchxfer::run_cli(argc, argv, std::cout, std::cerr); }
