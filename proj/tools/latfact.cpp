#include <iostream>

#include "latfact/cli.hpp"

int main(int argc, char** argv) { return latfact::cli_main(argc, argv, std::cout, std::cerr); }
