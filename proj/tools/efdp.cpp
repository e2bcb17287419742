#include <iostream>

#include "efdp/cli.hpp"

int main(int argc, char** argv) { return efdp::cli::run(argc, argv, std::cout, std::cerr); }
