#include <string>
#include <vector>

#include "wsansim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wsansim::run_cli(std::move(args));
}
