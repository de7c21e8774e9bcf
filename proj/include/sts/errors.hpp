#pragma once

#include <stdexcept>
#include <string>

namespace sts {

enum class Err {
  NonIncreasingPositions,
  BranchFactorBelowTwo,
  LengthMismatch,
  RootBranchingDisallowed,
  Overflow,
  DepthNegative,
  UnknownPreset,
  MissingParam,
  DimensionMismatch,
  LevelOutOfRange,
  StripTooLong,
  DepthExceedsLength,
  LadderTooShort,
  NotConverged,
  EmptyGrid,
  SpecParseError,
  UsageError,
};

const char* to_string(Err code);

// Single exception type carrying a typed code; NotConverged is the only
// code classified as a numerical (as opposed to validation) failure.
class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

}  // namespace sts
