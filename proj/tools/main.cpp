#include "hetsync/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return hetsync::run_cli(argc, argv, std::cout, std::cerr); }
