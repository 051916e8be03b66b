#include <iostream>

#include "cli.h"

int main(int argc, char** argv) { return nag::cli::run(argc, argv, std::cout, std::cerr); }
