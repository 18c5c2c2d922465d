#include <iostream>
#include <vector>

#include "slowmani/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return slowmani::run_cli(args, std::cout, std::cerr);
}
