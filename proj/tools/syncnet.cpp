#include <iostream>

#include "syncnet/cli.hpp"

int main(int argc, char** argv) { return syncnet::cli::run(argc, argv, std::cout, std::cerr); }
