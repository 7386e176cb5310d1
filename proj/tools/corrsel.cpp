#include "corrsel/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return corrsel::run_cli(argc, argv, std::cout, std::cerr); }
