#include <iostream>
#include <string>
#include <vector>

#include "mvac/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mvac::cli::run(args, std::cout, std::cerr);
}
