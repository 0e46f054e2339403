#include <iostream>
#include <string>
#include <vector>

#include "tabebm/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return tabebm::cli::run(args, std::cout, std::cerr);
}
