#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

namespace mor {

enum class GraphMethod { EpsBall, SymmetricKnn, MutualKnn };

std::string graph_method_name(GraphMethod method);
GraphMethod graph_method_from_name(const std::string& name);

struct GraphParams {
  GraphMethod method = GraphMethod::SymmetricKnn;
  int k = 30;       // neighbour count for the knn variants
  double eps = 0.0; // ball radius for the eps variant
  double t = std::numeric_limits<double>::infinity(); // Gaussian width; inf = binary weights
};

// Symmetric weighted neighbourhood graph over the columns of a point matrix.
struct NeighborGraph {
  Eigen::MatrixXd weights;                 // s x s, symmetric, zero diagonal
  std::vector<std::vector<int>> neighbors; // ascending adjacency lists
  GraphParams params;

  int size() const { return static_cast<int>(weights.rows()); }
  Eigen::VectorXd degrees() const { return weights.rowwise().sum(); }
};

// Builds the graph over the s columns of X (points in R^m).  Fails with
// DisconnectedGraph (reporting the component count) if the result is not a
// single component.
NeighborGraph build_graph(const Eigen::MatrixXd& X, const GraphParams& params);

enum class EmbedMethod { Lem, Lle };

std::string embed_method_name(EmbedMethod method);
EmbedMethod embed_method_from_name(const std::string& name);

struct Embedding {
  Eigen::MatrixXd Y;           // d x s reduced coordinates
  Eigen::VectorXd eigenvalues; // full ascending spectrum of the embedding operator
  int d = 0;
  EmbedMethod method = EmbedMethod::Lem;
};

// Laplacian Eigenmaps: rows of Y are eigenvectors 2..d+1 of the scaled
// Laplacian eigenproblem, unit-normalised, largest entry positive.
Embedding lem_embed(const NeighborGraph& graph, int d);

// Locally linear reconstruction weights, one row per node, rows sum to 1.
Eigen::MatrixXd lle_weights(const Eigen::MatrixXd& X, const NeighborGraph& graph,
                            double delta_reg = 0.001);

// LLE: rows of Y are eigenvectors 2..d+1 of M = (I-W)^T (I-W), ascending.
Embedding lle_embed(const Eigen::MatrixXd& weights, int d);

struct GlobalMap {
  Eigen::MatrixXd psi;      // m x d least-squares map on the centered embedding
  Eigen::MatrixXd psi_perp; // m x d with orthonormal columns
  Eigen::MatrixXd R;        // d x d upper triangular, psi = psi_perp * R
  Eigen::VectorXd y0;       // embedding of the zero snapshot (column 0)
};

// Optimal linear map from centered embedding coordinates to ambient space,
// psi = U Yc^T (Yc Yc^T)^-1 with Yc = Y - y0 1^T, plus its thin QR factors.
GlobalMap global_linearise(const Eigen::MatrixXd& U_amb, const Eigen::MatrixXd& Y);

// Indices of the n nearest columns of Y to y, ties broken by lowest index.
std::vector<int> nearest_in_reduced(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y, int n);

struct LocalTangent {
  Eigen::MatrixXd phi;      // m x d least-squares tangent
  Eigen::MatrixXd phi_perp; // m x d with orthonormal columns
  Eigen::MatrixXd R_perp;   // d x d upper triangular with positive diagonal
  std::vector<int> neighbor_ids;
  Eigen::VectorXd y_center; // mean of the neighbour embedding columns
};

// Least-squares affine tangent over the n nearest neighbours of y_cur:
// phi = U_N W_N Y_N^T (Y_N W_N Y_N^T)^-1 with the centering projector
// W_N = I - (1/N) 1 1^T, followed by a thin QR factorisation.
LocalTangent local_linearise(const Eigen::VectorXd& y_cur, const Eigen::MatrixXd& Y,
                             const Eigen::MatrixXd& U_amb, int n);

struct CorrDimEstimate {
  Eigen::VectorXd eps_grid; // ascending scales from 0 to the max pair distance
  Eigen::VectorXd p_cd;     // empirical fraction of pairs within each scale
  Eigen::VectorXd delta_sd; // forward-difference log-log slope; NaN where undefined
};

// Scale-dependent correlation dimension of the columns of X.
CorrDimEstimate correlation_dimension(const Eigen::MatrixXd& X, int grid_points = 100);

}  // namespace mor
