#include "bwalk/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bwalk::run_cli(argc, argv, std::cout, std::cerr); }
