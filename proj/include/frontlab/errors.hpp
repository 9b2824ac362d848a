#pragma once

#include <stdexcept>
#include <string>

namespace frontlab {

/// Base class for numerical failures (blow-up, non-convergence, degenerate
/// geometry). Distinct from std::invalid_argument / std::domain_error, which
/// signal contract violations by the caller.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

class BlowUpError : public SolverError {
 public:
  explicit BlowUpError(const std::string& what) : SolverError(what) {}
};

class DegenerateDomainError : public SolverError {
 public:
  explicit DegenerateDomainError(const std::string& what) : SolverError(what) {}
};

class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : SolverError(what), residual(residual) {}
  double residual;
};

/// The doubling search found no radius with negative principal eigenvalue
/// before the cap; the medium cannot sustain the population on any interval.
class NoCriticalRadiusError : public SolverError {
 public:
  explicit NoCriticalRadiusError(const std::string& what) : SolverError(what) {}
};

/// A Dirichlet periodic state collapsed to zero: the interval is at or below
/// the critical length.
class SubcriticalDomainError : public SolverError {
 public:
  explicit SubcriticalDomainError(const std::string& what) : SolverError(what) {}
};

/// The expansion-coefficient bracket could not be validated.
class NoThresholdError : public SolverError {
 public:
  explicit NoThresholdError(const std::string& what) : SolverError(what) {}
};

/// A classification stayed undecided where a verdict was required; carries the
/// last bracket so the caller can report it.
class InconclusiveError : public std::runtime_error {
 public:
  InconclusiveError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi) {}
  double bracket_lo;
  double bracket_hi;
};

/// Configuration parse/validation failure; message carries a field path or a
/// character position.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace frontlab
