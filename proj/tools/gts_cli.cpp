#include <iostream>

#include "gts/cli.hpp"

int main(int argc, char** argv) { return gts::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
