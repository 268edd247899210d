#include <iostream>

#include "rrl/cli.hpp"

int main(int argc, char** argv) { return rrl::dispatch(argc, argv, std::cout, std::cerr); }
