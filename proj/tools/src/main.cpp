// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "eth/cli.hpp"

int main(int argc, char** argv) { return eth::cli::run(argc, argv, std::cout, std::cerr); }
