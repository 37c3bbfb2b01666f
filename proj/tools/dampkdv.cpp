#include <iostream>

#include "dampkdv/cli.hpp"

int main(int argc, char** argv) { return dampkdv::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
