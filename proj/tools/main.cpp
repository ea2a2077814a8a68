#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return geocode::cli::run(argc, argv, std::cout, std::cerr); }
