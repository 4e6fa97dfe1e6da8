#include <iostream>

#include "nlki/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return nlki::run_cli(args, std::cout, std::cerr);
}
