#include <iostream>

#include "bflow/cli.hpp"

int main(int argc, char** argv) {
    return bflow::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
