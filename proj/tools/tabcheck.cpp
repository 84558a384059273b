#include <iostream>
#include <string>
#include <vector>

#include "tabcheck/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tabcheck::cli_main(args, std::cout, std::cerr);
}
