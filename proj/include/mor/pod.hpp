#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mor/rng.hpp"

namespace mor {

// Either a fixed dimension or a cumulative eigenvalue fraction target.
struct DimSpec {
  int d = -1;
  double ratio = -1.0;
  static DimSpec fixed(int d) { return DimSpec{d, -1.0}; }
  static DimSpec info_ratio(double r) { return DimSpec{-1, r}; }
  bool is_fixed() const { return d > 0; }
};

struct PodBasis {
  Eigen::MatrixXd psi;         // D x d, orthonormal columns
  Eigen::VectorXd eigenvalues; // of U^T U/(s-1), descending, clamped at 0
  Eigen::VectorXd cum_fraction;
  int d = 0;
};

// eigenvalues assumed descending; rank = count of lambda_i >= 1e-12 * lambda_1
int numerical_rank(const Eigen::VectorXd& eigenvalues);

PodBasis snapshot_pod(const Eigen::MatrixXd& U, const DimSpec& dim);

// descending eigenvalues of the snapshot covariance and cumulative fractions
void eigenvalue_decay(const Eigen::MatrixXd& U, Eigen::VectorXd& eigenvalues,
                      Eigen::VectorXd& cum_fraction);

struct Clustering {
  Eigen::MatrixXd centroids;              // D x k
  std::vector<std::vector<int>> clusters; // member column ids, each sorted
  std::vector<int> assignment;            // per column
};

Clustering kmeans_lloyd(const Eigen::MatrixXd& U, int k, RngStream& rng, int min_core,
                        int restart_budget = 100);

struct ClusterBounds {
  double r = 1.0;    // softening ratio
  int min_size = 30;
  int max_size = 50;
};

std::vector<std::vector<int>> enlarge_clusters(const Eigen::MatrixXd& U,
                                               const Eigen::MatrixXd& centroids,
                                               const std::vector<std::vector<int>>& clusters,
                                               const ClusterBounds& bounds);

struct LpodParams {
  int k = 6;
  int min_core = 7;
  ClusterBounds bounds;
};

struct LpodModel {
  Eigen::MatrixXd centroids;                    // D x k
  std::vector<std::vector<int>> core_clusters;  // from kmeans
  std::vector<std::vector<int>> clusters;       // enlarged
  std::vector<PodBasis> bases;                  // centered on the centroid
};

LpodModel lpod_offline(const Eigen::MatrixXd& U, const LpodParams& params, const DimSpec& dim,
                       RngStream& rng);

}  // namespace mor
