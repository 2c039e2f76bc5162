#include <iostream>

#include "expanderlab/cli.hpp"

int main(int argc, char** argv) { return expanderlab::run_cli(argc, argv, std::cout, std::cerr); }
