#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "ruinlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> env_format;
    if (const char* env = std::getenv("RUINLAB_FORMAT"); env != nullptr && *env != '\0') {
        env_format = env;
    }
    return ruinlab::cli::run(args, std::cout, std::cerr, env_format);
}
