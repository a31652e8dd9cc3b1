#pragma once

#include <stdexcept>
#include <string>

namespace matchpoa {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed textual input (bad rational literal, bad JSON, missing field).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// Structurally invalid input (non-square matrix, wrong vector length).
class ShapeError : public ParseError {
 public:
  explicit ShapeError(const std::string& what) : ParseError(what) {}
};

// A requested computation exceeds a configured budget or cap.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(what) {}
};

// Mathematically undefined request (ratio with nonpositive welfare,
// non-distribution vector where one is required).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

}  // namespace matchpoa
