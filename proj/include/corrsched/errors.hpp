#pragma once

#include <stdexcept>
#include <string>

namespace corrsched {

// Base for every error the library raises on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input has the wrong dimensions (non-square matrix, mismatched sizes).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input is well-formed but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A document could not be parsed. The message names the line or field.
class ParseError : public Error {
 public:
  using Error::Error;
};

// The requested computation exceeds a configured size limit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace corrsched
