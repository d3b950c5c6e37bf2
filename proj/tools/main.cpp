#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "wvpe/cli.hpp"

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv, argv + argc);
    const bool color = std::getenv("NO_COLOR") == nullptr && ::isatty(STDERR_FILENO);
    return wvpe::cli::run(args, std::cout, std::cerr, color);
}
