#include <string>
#include <vector>

#include "qduffing/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qduffing::run_cli(args);
}
