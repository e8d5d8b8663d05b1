#include <iostream>

#include "swarmid/commands.hpp"

int main(int argc, char** argv) { return swarmid::run_cli(argc, argv, std::cout, std::cerr); }
