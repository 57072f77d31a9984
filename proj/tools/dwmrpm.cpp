#include <iostream>

#include "dwmrpm/cli/commands.hpp"

int main(int argc, char** argv) { return dwmrpm::cli::run(argc, argv, std::cout, std::cerr); }
