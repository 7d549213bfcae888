#include <string>
#include <vector>

#include "fsvd/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fsvd::cli::run(args);
}
