#include <iostream>

#include "verisparse/cli.hpp"

int main(int argc, char** argv) { return verisparse::run_cli(argc, argv, std::cout, std::cerr); }
