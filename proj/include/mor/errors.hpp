#pragma once

#include <stdexcept>
#include <string>

namespace mor {

enum class ErrorCode {
  BadArgument,
  Io,
  BadConfig,
  PoreTouchesBoundary,
  UnmatchedBoundaryNode,
  NonPositiveJacobian,
  NoConvergence,
  SolverBreakdown,
  RankDeficient,
  ClusteringFailed,
  DisconnectedGraph,
  ZeroDegreeNode,
  SingularLocalSystem,
  SingularNeighborhood,
  RankDeficientEmbedding,
  ZeroReference,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);
  ErrorCode code() const { return code_; }
  // detail without the "Code: " prefix
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& detail);

inline void require(bool ok, ErrorCode code, const std::string& detail) {
  if (!ok) raise(code, detail);
}

}  // namespace mor
