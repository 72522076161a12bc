#include <iostream>

#include "eaco/cli.hpp"

int main(int argc, char **argv) {
    return eaco::cli::run_cli(argc, argv, std::cout, std::cerr);
}
