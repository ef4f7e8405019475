#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specinv {

/// Failure categories raised by the toolkit. Each maps to a distinct CLI exit code.
enum class ErrorCode {
  InvalidSpec,
  NonFiniteValue,
  ShapeMismatch,
  SolverFailure,
  NearSingular,
  NearEigenvalue,
  TruncationInsufficient,
  UnresolvedGrid,
  DegenerateSpectrum,
  ZeroFunction,
  OrderAmbiguous,
  ParityInconsistent,
  PreconditionViolated,
  DivergedLineSearch,
  ConfigInvalid,
  MissingInput,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Process exit status used by the CLI for an error of the given kind.
int exit_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace specinv
