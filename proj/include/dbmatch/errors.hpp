#pragma once

#include <stdexcept>
#include <string>

namespace dbmatch {

// Base class for all domain errors thrown by this library. Callers that do not
// care about the precise failure can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model parameter violations.
class InvalidDistribution final : public Error {
 public:
  using Error::Error;
};
class GammaOutOfRange final : public Error {
 public:
  using Error::Error;
};
class InvalidDelta final : public Error {
 public:
  using Error::Error;
};

// Structural mismatches between inputs.
class SizeMismatch final : public Error {
 public:
  using Error::Error;
};
class WidthMismatch final : public Error {
 public:
  using Error::Error;
};
class RowCountMismatch final : public Error {
 public:
  using Error::Error;
};
class PatternMismatch final : public Error {
 public:
  using Error::Error;
};
class SymbolOutOfRange final : public Error {
 public:
  using Error::Error;
};
class InvalidEpsilon final : public Error {
 public:
  using Error::Error;
};

// Resource guards.
class DimensionOverflow final : public Error {
 public:
  using Error::Error;
};

// Configuration and file I/O.
class ParseError final : public Error {
 public:
  using Error::Error;
};
class ValidationError final : public Error {
 public:
  using Error::Error;
};
class IoError final : public Error {
 public:
  using Error::Error;
};

}  // namespace dbmatch
