#include "flywheel/cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return flywheel::cli::run_app(args, std::cout, std::cerr);
}
