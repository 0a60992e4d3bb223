#include <iostream>

#include "granusim/cli.hpp"

int main(int argc, char** argv) { return granusim::dispatch(argc, argv, std::cout, std::cerr); }
