#include <string>
#include <vector>

#include "agile/cli/run.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return agile::cli::run(args);
}
