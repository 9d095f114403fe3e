#include <iostream>

#include "krossfuse/cli.hpp"

int main(int argc, char** argv) { return krossfuse::cli_main(argc, argv, std::cout, std::cerr); }
