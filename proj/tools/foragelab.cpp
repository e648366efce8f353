#include <string>
#include <vector>

#include "forage/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return forage::cli_main(args);
}
