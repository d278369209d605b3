#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bltk {

using Cplx = std::complex<double>;

// Evaluation hit a pole, a branch cut of log/sqrt, or some other point
// where the function is not analytic.
struct DomainError : std::runtime_error {
  Cplx where{};
  explicit DomainError(const std::string& msg, Cplx z = {})
      : std::runtime_error(msg), where(z) {}
};

// An iterative numerical procedure ran out of budget (subdivisions,
// steps, iterations) before reaching its tolerance.
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Syntax or lookup error in expression source, with byte offset.
struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)),
        offset(off) {}
};

// Verification-style failure: a precondition of an operation does not
// hold for the given inputs (zero on path, degree too low, ...).
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bltk
