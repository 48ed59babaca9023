#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace credreason::cli {

// Exit codes: 0 ok, 2 usage, 3 config, 4 backend, 5 validation.
// Flag precedence: command line > config file > environment > defaults.
int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                std::ostream& err = std::cerr);

}  // namespace credreason::cli
