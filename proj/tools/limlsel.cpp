#include <iostream>

#include "limlsel/cli/cli.hpp"

int main(int argc, char** argv) { return limlsel::cli::run(argc, argv, std::cout, std::cerr); }
