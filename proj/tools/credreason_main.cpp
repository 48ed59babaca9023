#include <vector>

#include "credreason/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return credreason::cli::run_command(args);
}
