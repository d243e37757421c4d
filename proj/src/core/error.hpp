// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace crmod {

// Mirrors crmod_status in the C header; values must stay in sync.
enum class ErrorCode : int {
  InvalidArgument = 1,
  NonLegendrian = 2,
  OutOfDomain = 3,
  BudgetExhausted = 4,
  NotContact = 5,
  Degenerate = 6,
  OrientationReversed = 7,
  Infeasible = 8,
  NotConverged = 9,
  Io = 10,
  Parse = 11,
  Internal = 12,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace crmod
