// SPDX-License-Identifier: Apache-2.0

#include "unlidar/error.hpp"

namespace unlidar {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownClusterId: return "UnknownClusterId";
    case ErrorCode::NonPositiveEdge: return "NonPositiveEdge";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::EdgeMismatch: return "EdgeMismatch";
    case ErrorCode::BothEmpty: return "BothEmpty";
    case ErrorCode::ZeroGlobalDensity: return "ZeroGlobalDensity";
    case ErrorCode::LabelingMismatch: return "LabelingMismatch";
    case ErrorCode::NoClusters: return "NoClusters";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::DuplicateTimestamps: return "DuplicateTimestamps";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::EmptyPairs: return "EmptyPairs";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace unlidar
