#include <iostream>

#include "pburgers/cli.hpp"

int main(int argc, char** argv) { return pburgers::run_cli(argc, argv, std::cout, std::cerr); }
