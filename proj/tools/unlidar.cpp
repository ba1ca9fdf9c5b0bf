// SPDX-License-Identifier: Apache-2.0

#include "unlidar/cli.hpp"

int main(int argc, char** argv) { return unlidar::cli::run(argc, argv); }
