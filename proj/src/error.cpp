#include "specinv/error.hpp"

namespace specinv {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::NearEigenvalue: return "NearEigenvalue";
    case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorCode::UnresolvedGrid: return "UnresolvedGrid";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::OrderAmbiguous: return "OrderAmbiguous";
    case ErrorCode::ParityInconsistent: return "ParityInconsistent";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::DivergedLineSearch: return "DivergedLineSearch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::MissingInput: return "MissingInput";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigInvalid: return 2;
    case ErrorCode::MissingInput: return 3;
    case ErrorCode::DegenerateSpectrum: return 10;
    case ErrorCode::OrderAmbiguous: return 11;
    case ErrorCode::ParityInconsistent: return 12;
    case ErrorCode::NearSingular: return 13;
    case ErrorCode::NearEigenvalue: return 14;
    case ErrorCode::TruncationInsufficient: return 15;
    case ErrorCode::UnresolvedGrid: return 16;
    case ErrorCode::ZeroFunction: return 17;
    case ErrorCode::DivergedLineSearch: return 18;
    case ErrorCode::SolverFailure: return 19;
    case ErrorCode::InvalidSpec: return 20;
    case ErrorCode::NonFiniteValue: return 21;
    case ErrorCode::ShapeMismatch: return 22;
    case ErrorCode::PreconditionViolated: return 23;
  }
  return 1;
}

}  // namespace specinv
