/// @file errors.hpp
/// @brief Error taxonomy: validation errors (bad inputs, bad scenarios) vs
///        solver errors (runtime failures of the numerical method).

#pragma once

#include <stdexcept>
#include <string>

namespace capstokes {

/// Raised when inputs violate a documented precondition: malformed config,
/// non-monotone response table, insufficient mass, spilling equilibrium,
/// degenerate mesh request, out-of-range table evaluation. Maps to CLI exit 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when the numerical method fails on admissible inputs: singular
/// saddle system, Newton divergence, degenerate flattening map, state leaving
/// the small-data regime. Maps to CLI exit 3.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace capstokes
