//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <ostream>

namespace bmri {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitIo = 4,
  kExitNumerical = 5,
  kExitOther = 6,
};

/// Entry point of the bmri tool; returns the process exit code.
int run_cli(int argc, const char *const *argv, std::ostream &out,
            std::ostream &err);

}  // namespace bmri
