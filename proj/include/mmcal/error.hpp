// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mmcal {

// Error categories. The CLI maps these onto process exit codes
// (ingestion -> 2, degenerate problem -> 3, init out of range -> 4).
enum class ErrorCode {
  InvalidArgument,
  DegenerateRotation,
  BehindCamera,
  DegenerateGeometry,
  Cheirality,
  EmptyCloud,
  ParseError,
  ValidationError,
  NoOverlap,
  EmptyEdges,
  DegenerateProblem,
  InitOutOfRange,
  OutOfField,
  EmptyView,
  IoError,
};

class CalibError : public std::runtime_error {
 public:
  CalibError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mmcal
