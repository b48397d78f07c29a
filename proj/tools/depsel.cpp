#include <iostream>

#include "depsel/cli.hpp"

int main(int argc, char** argv) { return depsel::run_cli(argc, argv, std::cout, std::cerr); }
