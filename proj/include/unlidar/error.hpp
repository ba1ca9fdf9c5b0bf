// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace unlidar {

enum class ErrorCode {
  MalformedRecord,
  NonMonotonicTimestamps,
  EmptySequence,
  WindowOutOfRange,
  EmptyInput,
  UnknownClusterId,
  NonPositiveEdge,
  EmptyCluster,
  EdgeMismatch,
  BothEmpty,
  ZeroGlobalDensity,
  LabelingMismatch,
  NoClusters,
  TooFewFrames,
  DuplicateTimestamps,
  EmptyQuery,
  NoOverlap,
  EmptyPairs,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace unlidar
