#include <iostream>

#include "cwave/cli.hpp"

int main(int argc, char** argv) { return cwave::cli_main(argc, argv, std::cout, std::cerr); }
