#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace poscop {

// Base class for every domain error raised by the library. The CLI maps any
// Error to exit code 1; usage problems (bad flags) never reach this type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text. `position` is a byte offset for formulas and a
// 1-based line number for file formats.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position(position) {}
  std::size_t position;
};

struct UnknownPrimitiveError : ParseError {
  UnknownPrimitiveError(const std::string& what, std::size_t position, std::string name)
      : ParseError(what, position), name(std::move(name)) {}
  std::string name;
};

struct FrameMismatchError : Error {
  using Error::Error;
};

// An operation would enumerate the worlds of a frame larger than the cap.
struct CapacityError : Error {
  using Error::Error;
};

struct InvalidDensityError : Error {
  using Error::Error;
};

// Conditioning on an event of possibility zero leaves the result undefined.
struct ZeroPossibilityError : Error {
  using Error::Error;
};

// Evidence with joint possibility zero.
struct ImpossibleEvidenceError : Error {
  using Error::Error;
};

// The pointwise product of two potentials vanished everywhere.
struct NotCombinableError : ImpossibleEvidenceError {
  using ImpossibleEvidenceError::ImpossibleEvidenceError;
};

// A custom normalization rule broke the coefficient contract.
struct RuleContractError : Error {
  using Error::Error;
};

// A model file failed validation (cycle, missing row, bad row maximum, ...).
struct ModelError : Error {
  using Error::Error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

}  // namespace poscop
