#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qgossip {

/// Base class for qgossip runtime failures. Construction-time validation of
/// arguments throws std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A QC update policy returned a value outside the interval mandated by the
/// rule that fired.
class PolicyViolationError : public Error {
 public:
  using Error::Error;
};

/// A protocol run exceeded its step budget without reaching the target set.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::int64_t steps_taken)
      : Error(what), steps_taken_(steps_taken) {}

  std::int64_t steps_taken() const noexcept { return steps_taken_; }

 private:
  std::int64_t steps_taken_;
};

/// The requested operation needs a graph property the input lacks
/// (QA requires a complete digraph for the surplus send-back).
class UnsupportedTopologyError : public Error {
 public:
  using Error::Error;
};

/// The Lyapunov tracker was asked to decrement a counter below zero; the
/// fed event stream does not come from a genuine QA trajectory.
class TrackerCorruptionError : public Error {
 public:
  using Error::Error;
};

/// No finite mean hitting time exists (target unreachable from some state,
/// or the first-step system is singular).
class NoFiniteHittingTimeError : public Error {
 public:
  using Error::Error;
};

/// A closed-form hypothesis does not hold for the supplied parameters.
class HypothesisViolationError : public Error {
 public:
  using Error::Error;
};

/// Malformed spec string or input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qgossip
