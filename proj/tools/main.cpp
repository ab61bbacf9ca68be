#include <iostream>

#include "hetcache/experiment.hpp"

int main(int argc, char** argv) { return hetcache::cli::main_entry(argc, argv, std::cout, std::cerr); }
