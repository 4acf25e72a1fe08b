#include "efie/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return efie::main_cli(argc, argv, std::cout, std::cerr); }
