#include <vector>

#include "kronmde/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return kronmde::cli_main(args);
}
