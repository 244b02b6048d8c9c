#include <iostream>

#include "cellmix/cli.hpp"

int main(int argc, char** argv) { return cellmix::cli::run(argc, argv, std::cout, std::cerr); }
