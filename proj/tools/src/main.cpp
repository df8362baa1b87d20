#include <iostream>

#include "fairmix_cli/cli.hpp"

int main(int argc, char** argv) { return fairmix::cli::run_cli(argc, argv, std::cout, std::cerr); }
