#include <string>
#include <vector>

#include "l0sense/cli.hpp"

int main(int argc, char** argv) {
    return l0sense::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
