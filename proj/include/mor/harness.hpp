#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "mor/config.hpp"
#include "mor/fem.hpp"
#include "mor/manifold.hpp"
#include "mor/rng.hpp"
#include "mor/rom.hpp"

namespace mor {

struct LoadPath {
  int id = 0;
  Eigen::Matrix3d N_lp = Eigen::Matrix3d::Zero(); // unit path direction
  std::vector<Eigen::Matrix3d> N_ls;              // unit per-step perturbations
  std::vector<Eigen::Matrix3d> H_steps;           // cumulative gradients, step 1..n
};

// Random walk H_n = H_{n-1} + dH_lp*N_lp + dH_ls*N_ls(n) from H_0 = 0.
// Draws are path-major, so the first paths of a longer run replicate a
// shorter run with the same stream.
std::vector<LoadPath> generate_load_paths(int count, RngStream& rng, double dH_lp, double dH_ls,
                                          int steps);

std::string paths_to_json_text(const std::vector<LoadPath>& paths);
std::vector<LoadPath> paths_from_json_text(const std::string& text);

struct SnapshotMeta {
  int path_id = -1; // -1 marks the zero column
  int step = -1;
  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
};

struct SnapshotSet {
  Eigen::MatrixXd U; // D x s independent-dof fluctuations, column 0 = zero
  std::vector<SnapshotMeta> meta;
};

SnapshotSet collect_snapshots(const std::vector<LoadPath>& paths, FemSystem& system,
                              const SolverSettings& settings);

// Per-column relative L2 errors in percent: (mean, max) over columns.
std::pair<double, double> error_metrics(const Eigen::MatrixXd& rom_states,
                                        const Eigen::MatrixXd& ref_states);

std::string eigenvalue_decay_csv(const Eigen::MatrixXd& U);
std::string corrdim_csv(const CorrDimEstimate& est);

// Fits the model a MethodConfig names. Retries graph construction with a
// doubled neighbourhood on DisconnectedGraph.
RomModel train_model(const Eigen::MatrixXd& U, const MethodConfig& method, std::uint64_t seed);

struct CellReport {
  std::string method;
  int d = 0;
  double E_mean_pct = 0.0;
  double E_max_pct = 0.0;
  double wall_s = 0.0; // online replay wall time
  int converged_paths = 0;
  int total_paths = 0;
  std::string error; // nonempty if the whole cell failed
  std::vector<StepTrace> trace;
  std::vector<bool> path_converged;
};

struct CampaignResult {
  std::vector<CellReport> cells;
  Eigen::VectorXd eigenvalues;   // training snapshot covariance spectrum
  Eigen::VectorXd cum_fraction;
  int snapshot_count = 0;
  int dim = 0; // independent dofs
};

std::string report_csv(const CampaignResult& result);
std::string trace_csv(const std::vector<StepTrace>& trace);

// Full pipeline: mesh, training solves, per-method train + replay of all
// paths. Writes report.csv, eigen_decay.csv and traces/*.csv under out_dir
// unless it is empty.
CampaignResult run_campaign(const Config& config, const std::string& out_dir = "");

}  // namespace mor
