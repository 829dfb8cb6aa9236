#include <iostream>

#include "btrv/cli/commands.hpp"

int main(int argc, char** argv) { return btrv::cli::main(argc, argv, std::cout, std::cerr); }
