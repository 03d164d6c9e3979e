#include <iostream>

#include "hrwave/cli/commands.hpp"

int main(int argc, char** argv) { return hrwave::cli::main(argc, argv, std::cout, std::cerr); }
