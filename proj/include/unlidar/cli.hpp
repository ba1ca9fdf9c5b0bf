// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace unlidar::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfigError = 2,
  kInputError = 3,
  kLowConfidence = 4,
  kNoOverlap = 5,
};

/// Entry point of the `unlidar` tool: detect, eval, synth and plot.
int run(int argc, const char* const* argv);

/// Convenience for tests: argv[0] is supplied.
int run(const std::vector<std::string>& args);

/// FNV-1a 64-bit digest of a file (or of every regular file of a directory,
/// in name order), hex encoded.
std::string content_hash(const std::filesystem::path& path);

}  // namespace unlidar::cli
