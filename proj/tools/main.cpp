// main.cpp — fermidyn command-line entry point

#include "fermidyn/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return fermidyn::run_cli(args, std::cout, std::cerr);
}
