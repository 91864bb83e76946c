#include <iostream>

#include "padicq/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return padicq::run_cli(args, std::cout, std::cerr);
}
