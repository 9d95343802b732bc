//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <iostream>

#include "bmri/cli.hpp"

int main(int argc, char **argv) {
  return bmri::run_cli(argc, argv, std::cout, std::cerr);
}
