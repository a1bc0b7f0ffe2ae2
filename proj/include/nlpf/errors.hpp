#pragma once

#include <stdexcept>
#include <string>

namespace nlpf {

// Every failure mode surfaces as a typed exception so callers (and the CLI
// exit-code mapping) can tell configuration problems from solver breakdowns.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inadmissible data or arguments (A1-A4 style violations, bad preconditions).
struct DomainError : Error { using Error::Error; };
struct MeshError : Error { using Error::Error; };
struct KernelError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct DataError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct GridError : Error { using Error::Error; };

// Solver breakdowns.
struct SolveError : Error { using Error::Error; };
struct NegativityLoss : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct BracketFailure : Error { using Error::Error; };
struct StepTooLarge : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };

// Configuration text problems.
struct ParseError : Error { using Error::Error; };
struct UnknownKey : Error { using Error::Error; };

}  // namespace nlpf
