#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace holointerp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DuplicatePoint : public Error {
 public:
  DuplicatePoint(std::size_t i, std::size_t j)
      : Error("duplicate point at indices " + std::to_string(i) + " and " + std::to_string(j)),
        first(i),
        second(j) {}
  std::size_t first;
  std::size_t second;
};

/// An intermediate coordinate exceeded the escape threshold during evaluation.
class Overflow : public Error {
 public:
  explicit Overflow(std::size_t letter)
      : Error("orbit escaped at letter " + std::to_string(letter)), letter_index(letter) {}
  std::size_t letter_index;
};

class SeparationFailure : public Error {
 public:
  using Error::Error;
};

class ClearanceViolation : public Error {
 public:
  using Error::Error;
};

class NotInSubspace : public Error {
 public:
  using Error::Error;
};

class EmptySequence : public Error {
 public:
  EmptySequence() : Error("empty sequence") {}
};

class UncertifiablePattern : public Error {
 public:
  using Error::Error;
};

class StepInfeasible : public Error {
 public:
  using Error::Error;
};

class ScheduleExhausted : public Error {
 public:
  using Error::Error;
};

class ResolutionTooCoarse : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string f, std::string r)
      : Error("invalid " + f + ": " + r), field(std::move(f)), reason(std::move(r)) {}
  std::string field;
  std::string reason;
};

}  // namespace holointerp
