#include <iostream>

#include "gibbstree/cli.hpp"

int main(int argc, char** argv) { return gibbstree::cli::run(argc, argv, std::cout, std::cerr); }
