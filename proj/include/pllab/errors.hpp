#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pllab {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- construction / configuration -----------------------------------------
struct DimensionMismatch : Error {
  using Error::Error;
};
struct InvalidParams : Error {
  using Error::Error;
};
struct UnknownCatalogueName : Error {
  using Error::Error;
};
struct ConfigParseError : Error {
  using Error::Error;
};

// ---- evaluation ------------------------------------------------------------
struct NonFiniteValue : Error {
  using Error::Error;
};
struct NoAnalyticDerivative : Error {
  using Error::Error;
};

// ---- expression parsing ----------------------------------------------------
// position is a byte offset into the source string, in [0, source.size()].
struct SyntaxError : Error {
  std::size_t position;
  SyntaxError(std::size_t pos, const std::string& msg)
      : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};
struct UnknownIdentifier : SyntaxError {
  using SyntaxError::SyntaxError;
};
struct VariableOutOfRange : SyntaxError {
  using SyntaxError::SyntaxError;
};

// ---- gradient flow ---------------------------------------------------------
struct StepSizeUnderflow : Error {
  using Error::Error;
};
struct NotConverged : Error {
  using Error::Error;
};
struct NoWitnessFound : Error {
  using Error::Error;
};

// ---- certification ---------------------------------------------------------
struct AllPointsSkipped : Error {
  using Error::Error;
};
struct InfBelowSamples : Error {
  using Error::Error;
};
struct EmptyArgminModel : Error {
  using Error::Error;
};

// ---- minimal-set analysis --------------------------------------------------
struct NoMinimizerFound : Error {
  using Error::Error;
};
struct RadiusNotFound : Error {
  using Error::Error;
};
struct KernelEmpty : Error {
  using Error::Error;
};

// ---- distance fields -------------------------------------------------------
struct NonUniqueProjection : Error {
  using Error::Error;
};

}  // namespace pllab
