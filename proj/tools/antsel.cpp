// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "antsel/cli.hpp"

int main(int argc, char** argv)
{
    return antsel::cli::run(argc, argv, std::cout, std::cerr);
}
