#include "mor/errors.hpp"

namespace mor {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::PoreTouchesBoundary: return "PoreTouchesBoundary";
    case ErrorCode::UnmatchedBoundaryNode: return "UnmatchedBoundaryNode";
    case ErrorCode::NonPositiveJacobian: return "NonPositiveJacobian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SolverBreakdown: return "SolverBreakdown";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ClusteringFailed: return "ClusteringFailed";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::ZeroDegreeNode: return "ZeroDegreeNode";
    case ErrorCode::SingularLocalSystem: return "SingularLocalSystem";
    case ErrorCode::SingularNeighborhood: return "SingularNeighborhood";
    case ErrorCode::RankDeficientEmbedding: return "RankDeficientEmbedding";
    case ErrorCode::ZeroReference: return "ZeroReference";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

void raise(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace mor
