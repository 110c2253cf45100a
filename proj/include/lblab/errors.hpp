#pragma once

#include <stdexcept>
#include <string>

namespace lblab {

// Error taxonomy mirrored by the CLI exit codes:
//   InvalidInputError                  -> 2 (usage / validation)
//   ParseError, IoError                -> 3 (parse / IO)
//   AlignmentError, DegenerateInputError -> 4 (alignment / degenerate statistics)

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A value, shape, or configuration violates a documented precondition.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A file or text input could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A filesystem operation failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Two inputs that must share sample identities do not.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined for the given data (e.g. zero variance).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace lblab
