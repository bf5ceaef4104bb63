#include <iostream>
#include <string>
#include <vector>

#include "matchkit/report.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return matchkit::run_command(std::move(args), std::cout, std::cerr);
}
