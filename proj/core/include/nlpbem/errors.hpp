/** \file errors.hpp
 *  \brief Typed error hierarchy for the nlpbem library.
 *
 *  Every throwing path in the library uses one of these types so callers
 *  (CLI, tests) can map failures to exit codes: configuration problems,
 *  invalid mathematical input, and numerical breakdowns are distinguishable.
 */
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace nlpbem {

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid mathematical input (argument outside the operation's domain).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested exactly at a singular point (e.g. x = 0 of a
/// function with a pole there).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A conformal/spectral map evaluated at its pole (eps = 1, z = ±i).
class PoleError : public Error {
 public:
  using Error::Error;
};

/// A stated hypothesis of the computation is violated (e.g. Im z > 0).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Coefficient evaluation exactly on a resonance (vanishing denominator).
class OnResonanceError : public Error {
 public:
  using Error::Error;
};

/// Mesh loading / validation failures (non-manifold, open surface, ...).
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Operator assembly failures (singular static factorization, ...).
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Linear solve attempted too close to a resonance; carries the condition
/// estimate that triggered the refusal.
class NearResonanceError : public Error {
 public:
  NearResonanceError(const std::string& msg, double condition_estimate)
      : Error(msg), condition_estimate(condition_estimate) {}
  double condition_estimate;
};

/// Iteration failed to converge; carries the last iterate for diagnostics.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& msg, std::complex<double> last_iterate)
      : Error(msg), last_iterate(last_iterate) {}
  std::complex<double> last_iterate;
};

/// Rank detection in the contour solver found no clear singular-value gap.
class RankAmbiguityError : public Error {
 public:
  using Error::Error;
};

/// Contour quadrature did not converge (contour likely too close to a pole).
class ContourError : public Error {
 public:
  using Error::Error;
};

/// A pole failed the semisimplicity check required by the modal machinery.
class NonSimplePoleError : public Error {
 public:
  using Error::Error;
};

/// CLI/config-file problems (maps to exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlpbem
