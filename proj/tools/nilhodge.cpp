#include <iostream>
#include <string>
#include <vector>

#include "nilhodge/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return nilhodge::run_command(args, std::cout, std::cerr);
}
