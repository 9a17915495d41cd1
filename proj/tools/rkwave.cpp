#include <iostream>

#include "rkwave/cli.hpp"

int main(int argc, char** argv) { return rkwave::cli::run(argc, argv, std::cout, std::cerr); }
