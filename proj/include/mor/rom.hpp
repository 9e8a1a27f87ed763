#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mor/fem.hpp"
#include "mor/manifold.hpp"
#include "mor/pod.hpp"

namespace mor {

// Locally-linearised manifold ROM: embedding plus the ambient snapshots the
// online tangent fits are computed against.
struct ManlModel {
  Eigen::MatrixXd U_ambient;  // m x s ambient snapshots
  Embedding embedding;        // d x s reduced coordinates
  GraphParams graph;
  int n_lin = 20;             // tangent neighborhood size
  bool orthonormalise = true; // QR-orthonormalise the tangent each iteration
};

// Two-stage scheme: stage-1 POD compression to d_bar, manifold embedding of
// the intermediate coordinates, tangent fits in the intermediate space.
struct TwoStageModel {
  Eigen::MatrixXd psi_bar; // D x d_bar stage-1 basis
  Eigen::MatrixXd Y_bar;   // d_bar x s intermediate snapshots
  Embedding embedding;     // d x s reduced coordinates
  GraphParams graph;
  int n_lin = 20;
  bool orthonormalise = true;
};

enum class RomKind { Pod, Lpod, ManifoldLocal, TwoStage };

struct RomModel {
  RomKind kind = RomKind::Pod;
  PodBasis pod;
  LpodModel lpod;
  ManlModel manl;
  TwoStageModel two_stage;
};

struct RomSolveResult {
  Eigen::MatrixXd states; // D x steps converged fluctuations, independent dofs
  std::vector<StepTrace> trace;
};

ManlModel manl_offline(const Eigen::MatrixXd& U, int d, const GraphParams& graph,
                       EmbedMethod method, int n_lin, bool orthonormalise = true);

TwoStageModel two_stage_offline(const Eigen::MatrixXd& U, int d_bar, int d,
                                const GraphParams& graph, EmbedMethod method, int n_lin,
                                bool orthonormalise = true);

RomSolveResult rom_solve_pod(const PodBasis& model, FemSystem& system,
                             const std::vector<Eigen::Matrix3d>& path,
                             const SolverSettings& settings, int path_id = 0);

RomSolveResult rom_solve_lpod(const LpodModel& model, FemSystem& system,
                              const std::vector<Eigen::Matrix3d>& path,
                              const SolverSettings& settings, int path_id = 0);

RomSolveResult rom_solve_manl(const ManlModel& model, FemSystem& system,
                              const std::vector<Eigen::Matrix3d>& path,
                              const SolverSettings& settings, int path_id = 0);

RomSolveResult rom_solve_two_stage(const TwoStageModel& model, FemSystem& system,
                                   const std::vector<Eigen::Matrix3d>& path,
                                   const SolverSettings& settings, int path_id = 0);

RomSolveResult rom_solve(const RomModel& model, FemSystem& system,
                         const std::vector<Eigen::Matrix3d>& path, const SolverSettings& settings,
                         int path_id = 0);

}  // namespace mor
