#include <iostream>

#include "certibif/cli.hpp"

int main(int argc, char** argv) { return certibif::run_cli(argc, argv, std::cout, std::cerr); }
