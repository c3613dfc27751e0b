#pragma once

#include <stdexcept>
#include <string>

namespace starlocal {

// Base class for everything thrown on purpose by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid parameter value or malformed input (CLI exit code 2).
struct ArgumentError : Error {
  explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

// A requested object would exceed a hard size cap (CLI exit code 3).
struct SizeError : Error {
  explicit SizeError(const std::string& msg) : Error(msg) {}
};

// An operation annihilated its input (e.g. a filter or projection with
// success weight below threshold), so no normalized output exists
// (CLI exit code 3).
struct DegenerateError : Error {
  explicit DegenerateError(const std::string& msg) : Error(msg) {}
};

// An iterative routine failed to converge or an internal self-check
// tripped (CLI exit code 4).
struct SolverError : Error {
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

}  // namespace starlocal
