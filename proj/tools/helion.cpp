#include "helion/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return helion::run_cli(argc, argv, std::cout, std::cerr); }
