#include <iostream>

#include "uniloc/cli/commands.hpp"

int main(int argc, char** argv) { return uniloc::cli::run(argc, argv, std::cout, std::cerr); }
