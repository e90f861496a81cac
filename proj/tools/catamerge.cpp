#include <iostream>

#include "catamerge/cli.hpp"

int main(int argc, char **argv) { return catamerge::run_cli(argc, argv, std::cout, std::cerr); }
