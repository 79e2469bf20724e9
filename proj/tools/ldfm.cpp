#include <iostream>

#include "ldfm/cli.hpp"

int main(int argc, char** argv) { return ldfm::run_cli(argc, argv, std::cout, std::cerr); }
