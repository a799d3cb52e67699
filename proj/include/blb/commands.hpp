// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blb::cli {

/// Exit codes: 0 success, 1 a toolkit error, 2 a command-line usage error.
/// Errors are also written as JSON to <out>/error.json when an output
/// directory is known, and to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Environment variable holding the default output directory.
inline constexpr const char* kOutputDirEnv = "BLB_OUTPUT_DIR";

}  // namespace blb::cli
