#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return blobtrack::cli::parse_and_run(argc, argv, std::cout, std::cerr); }
