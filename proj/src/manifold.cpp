#include "mor/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "mor/errors.hpp"
#include "mor/log.hpp"

namespace mor {

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (v[imax] < 0.0) v = -v;
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& X) {
  const Eigen::Index s = X.cols();
  Eigen::VectorXd sq = X.colwise().squaredNorm();
  Eigen::MatrixXd D2 = sq.replicate(1, s) + sq.transpose().replicate(s, 1) -
                       2.0 * (X.transpose() * X);
  return D2.cwiseMax(0.0).cwiseSqrt();
}

int count_components(const std::vector<std::vector<int>>& adj) {
  const int s = static_cast<int>(adj.size());
  std::vector<char> seen(static_cast<size_t>(s), 0);
  int components = 0;
  for (int start = 0; start < s; ++start) {
    if (seen[static_cast<size_t>(start)]) continue;
    ++components;
    std::queue<int> frontier;
    frontier.push(start);
    seen[static_cast<size_t>(start)] = 1;
    while (!frontier.empty()) {
      const int node = frontier.front();
      frontier.pop();
      for (int next : adj[static_cast<size_t>(node)])
        if (!seen[static_cast<size_t>(next)]) {
          seen[static_cast<size_t>(next)] = 1;
          frontier.push(next);
        }
    }
  }
  return components;
}

// thin QR with the diagonal of R forced positive; returns false if R is
// numerically singular
bool thin_qr_positive(const Eigen::MatrixXd& A, Eigen::MatrixXd& Q, Eigen::MatrixXd& R) {
  const Eigen::Index m = A.rows(), d = A.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, d);
  R = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) max_diag = std::max(max_diag, std::abs(R(i, i)));
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(R(i, i)) <= 1e-12 * max_diag) return false;
    if (R(i, i) < 0.0) {
      R.row(i) = -R.row(i);
      Q.col(i) = -Q.col(i);
    }
  }
  return true;
}

}  // namespace

std::string graph_method_name(GraphMethod method) {
  switch (method) {
    case GraphMethod::EpsBall: return "eps-ball";
    case GraphMethod::SymmetricKnn: return "symmetric-knn";
    case GraphMethod::MutualKnn: return "mutual-knn";
  }
  return "unknown";
}

GraphMethod graph_method_from_name(const std::string& name) {
  if (name == "eps-ball") return GraphMethod::EpsBall;
  if (name == "symmetric-knn") return GraphMethod::SymmetricKnn;
  if (name == "mutual-knn") return GraphMethod::MutualKnn;
  raise(ErrorCode::BadConfig, "unknown graph method '" + name + "'");
}

std::string embed_method_name(EmbedMethod method) {
  return method == EmbedMethod::Lem ? "lem" : "lle";
}

EmbedMethod embed_method_from_name(const std::string& name) {
  if (name == "lem") return EmbedMethod::Lem;
  if (name == "lle") return EmbedMethod::Lle;
  raise(ErrorCode::BadConfig, "unknown embedding method '" + name + "'");
}

NeighborGraph build_graph(const Eigen::MatrixXd& X, const GraphParams& params) {
  const int s = static_cast<int>(X.cols());
  require(s >= 3, ErrorCode::BadArgument, "need at least 3 points");
  Eigen::MatrixXd dist = pairwise_distances(X);

  Eigen::MatrixXi adjacency = Eigen::MatrixXi::Zero(s, s);
  if (params.method == GraphMethod::EpsBall) {
    require(params.eps > 0.0, ErrorCode::BadConfig, "eps must be positive");
    for (int i = 0; i < s; ++i)
      for (int j = i + 1; j < s; ++j)
        if (dist(i, j) <= params.eps) adjacency(i, j) = adjacency(j, i) = 1;
  } else {
    require(params.k >= 1 && params.k < s, ErrorCode::BadConfig, "k must lie in [1, s)");
    // per-node k nearest others, ties by lowest index
    Eigen::MatrixXi knn = Eigen::MatrixXi::Zero(s, s);
    std::vector<std::pair<double, int>> order;
    for (int i = 0; i < s; ++i) {
      order.clear();
      for (int j = 0; j < s; ++j)
        if (j != i) order.emplace_back(dist(i, j), j);
      std::sort(order.begin(), order.end());
      for (int r = 0; r < params.k; ++r) knn(i, order[static_cast<size_t>(r)].second) = 1;
    }
    for (int i = 0; i < s; ++i)
      for (int j = i + 1; j < s; ++j) {
        const bool edge = params.method == GraphMethod::SymmetricKnn
                              ? (knn(i, j) || knn(j, i))
                              : (knn(i, j) && knn(j, i));
        if (edge) adjacency(i, j) = adjacency(j, i) = 1;
      }
  }

  NeighborGraph graph;
  graph.params = params;
  graph.neighbors.assign(static_cast<size_t>(s), {});
  graph.weights = Eigen::MatrixXd::Zero(s, s);
  const bool binary = std::isinf(params.t);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      if (adjacency(i, j)) {
        graph.neighbors[static_cast<size_t>(i)].push_back(j);
        graph.weights(i, j) =
            binary ? 1.0 : std::exp(-dist(i, j) * dist(i, j) / params.t);
      }

  const int components = count_components(graph.neighbors);
  if (components > 1)
    raise(ErrorCode::DisconnectedGraph,
          "graph has " + std::to_string(components) + " components");
  return graph;
}

Embedding lem_embed(const NeighborGraph& graph, int d) {
  const int s = graph.size();
  require(d >= 1 && d <= s - 2, ErrorCode::BadArgument, "d must lie in [1, s-2]");
  Eigen::VectorXd deg = graph.degrees();
  for (int i = 0; i < s; ++i)
    if (deg[i] <= 0.0)
      raise(ErrorCode::ZeroDegreeNode, "node " + std::to_string(i) + " has zero degree");

  // generalised problem L v = lambda D v via the symmetric form
  // D^-1/2 L D^-1/2 w = lambda w, v = D^-1/2 w
  Eigen::VectorXd dinv_sqrt = deg.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd L = Eigen::MatrixXd(deg.asDiagonal()) - graph.weights;
  Eigen::MatrixXd L_sym = dinv_sqrt.asDiagonal() * L * dinv_sqrt.asDiagonal();
  L_sym = 0.5 * (L_sym + L_sym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L_sym);
  require(eig.info() == Eigen::Success, ErrorCode::SolverBreakdown, "Laplacian eigensolve failed");

  Embedding emb;
  emb.method = EmbedMethod::Lem;
  emb.d = d;
  emb.eigenvalues = eig.eigenvalues();
  emb.Y.resize(d, s);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd v = dinv_sqrt.asDiagonal() * eig.eigenvectors().col(i + 1);
    v /= v.norm();
    fix_sign(v);
    emb.Y.row(i) = v.transpose();
  }
  return emb;
}

Eigen::MatrixXd lle_weights(const Eigen::MatrixXd& X, const NeighborGraph& graph,
                            double delta_reg) {
  const int s = static_cast<int>(X.cols());
  const int m = static_cast<int>(X.rows());
  require(graph.size() == s, ErrorCode::BadArgument, "graph/point count mismatch");
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(s, s);
  for (int i = 0; i < s; ++i) {
    const auto& nbrs = graph.neighbors[static_cast<size_t>(i)];
    const int n = static_cast<int>(nbrs.size());
    if (n == 0)
      raise(ErrorCode::ZeroDegreeNode, "node " + std::to_string(i) + " has no neighbors");
    Eigen::MatrixXd Z(m, n);
    for (int j = 0; j < n; ++j) Z.col(j) = X.col(nbrs[static_cast<size_t>(j)]) - X.col(i);
    Eigen::MatrixXd G = Z.transpose() * Z;

    bool regularise = n > m;
    if (!regularise) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
      const double lmax = eig.eigenvalues().maxCoeff();
      const double lmin = eig.eigenvalues().minCoeff();
      regularise = lmax <= 0.0 || lmin <= lmax / 1e12;
    }
    if (regularise) G.diagonal().array() += (delta_reg * delta_reg / n) * G.trace();

    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    Eigen::VectorXd w = ldlt.solve(Eigen::VectorXd::Ones(n));
    const double sum = w.sum();
    if (ldlt.info() != Eigen::Success || !w.allFinite() || std::abs(sum) < 1e-14)
      raise(ErrorCode::SingularLocalSystem,
            "reconstruction weights for node " + std::to_string(i) + " are singular");
    w /= sum;
    for (int j = 0; j < n; ++j) W(i, nbrs[static_cast<size_t>(j)]) = w[j];
  }
  return W;
}

Embedding lle_embed(const Eigen::MatrixXd& weights, int d) {
  const int s = static_cast<int>(weights.rows());
  require(weights.cols() == s, ErrorCode::BadArgument, "weight matrix must be square");
  require(d >= 1 && d <= s - 2, ErrorCode::BadArgument, "d must lie in [1, s-2]");
  Eigen::MatrixXd IW = Eigen::MatrixXd::Identity(s, s) - weights;
  Eigen::MatrixXd M = IW.transpose() * IW;
  M = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
  require(eig.info() == Eigen::Success, ErrorCode::SolverBreakdown, "embedding eigensolve failed");

  Embedding emb;
  emb.method = EmbedMethod::Lle;
  emb.d = d;
  emb.eigenvalues = eig.eigenvalues();
  emb.Y.resize(d, s);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd v = eig.eigenvectors().col(i + 1);
    fix_sign(v);
    emb.Y.row(i) = v.transpose();
  }
  return emb;
}

GlobalMap global_linearise(const Eigen::MatrixXd& U_amb, const Eigen::MatrixXd& Y) {
  const Eigen::Index s = Y.cols();
  require(U_amb.cols() == s, ErrorCode::BadArgument, "snapshot/embedding count mismatch");
  GlobalMap map;
  map.y0 = Y.col(0);
  Eigen::MatrixXd Yc = Y.colwise() - map.y0;
  Eigen::MatrixXd S = Yc * Yc.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmax <= 0.0 || eig.eigenvalues().minCoeff() <= 1e-12 * lmax)
    raise(ErrorCode::RankDeficientEmbedding, "centered embedding rows are linearly dependent");
  map.psi = S.ldlt().solve(Yc * U_amb.transpose()).transpose();
  if (!thin_qr_positive(map.psi, map.psi_perp, map.R))
    raise(ErrorCode::RankDeficientEmbedding, "least-squares map is rank-deficient");
  return map;
}

std::vector<int> nearest_in_reduced(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y, int n) {
  const int s = static_cast<int>(Y.cols());
  require(n >= 1 && n <= s, ErrorCode::BadArgument, "n must lie in [1, s]");
  // single-precision keys: nearly tied distances resolve by snapshot index, so
  // the selected chart is stable under last-bit perturbations of the query
  std::vector<std::pair<float, int>> order;
  order.reserve(static_cast<size_t>(s));
  for (int j = 0; j < s; ++j)
    order.emplace_back(static_cast<float>((Y.col(j) - y).squaredNorm()), j);
  std::sort(order.begin(), order.end());
  std::vector<int> ids(static_cast<size_t>(n));
  for (int r = 0; r < n; ++r) ids[static_cast<size_t>(r)] = order[static_cast<size_t>(r)].second;
  return ids;
}

LocalTangent local_linearise(const Eigen::VectorXd& y_cur, const Eigen::MatrixXd& Y,
                             const Eigen::MatrixXd& U_amb, int n) {
  const int d = static_cast<int>(Y.rows());
  const int s = static_cast<int>(Y.cols());
  require(U_amb.cols() == s, ErrorCode::BadArgument, "snapshot/embedding count mismatch");
  require(n <= s, ErrorCode::BadArgument, "n exceeds snapshot count");
  if (n <= d)
    raise(ErrorCode::SingularNeighborhood,
          "neighborhood size " + std::to_string(n) + " must exceed embedding dimension " +
              std::to_string(d));

  LocalTangent tangent;
  tangent.neighbor_ids = nearest_in_reduced(y_cur, Y, n);
  Eigen::MatrixXd Yn(d, n), Un(U_amb.rows(), n);
  for (int j = 0; j < n; ++j) {
    Yn.col(j) = Y.col(tangent.neighbor_ids[static_cast<size_t>(j)]);
    Un.col(j) = U_amb.col(tangent.neighbor_ids[static_cast<size_t>(j)]);
  }
  tangent.y_center = Yn.rowwise().mean();
  Eigen::MatrixXd Ytil = Yn.colwise() - tangent.y_center;
  Eigen::MatrixXd Util = Un.colwise() - Eigen::VectorXd(Un.rowwise().mean());

  Eigen::MatrixXd S = Ytil * Ytil.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmax <= 0.0 || eig.eigenvalues().minCoeff() <= 1e-12 * lmax)
    raise(ErrorCode::SingularNeighborhood, "neighborhood spread is rank-deficient");
  tangent.phi = S.ldlt().solve(Ytil * Util.transpose()).transpose();
  if (!thin_qr_positive(tangent.phi, tangent.phi_perp, tangent.R_perp))
    raise(ErrorCode::SingularNeighborhood, "tangent map is rank-deficient");
  return tangent;
}

CorrDimEstimate correlation_dimension(const Eigen::MatrixXd& X, int grid_points) {
  const int s = static_cast<int>(X.cols());
  require(s >= 2, ErrorCode::BadArgument, "need at least 2 points");
  require(grid_points >= 1, ErrorCode::BadArgument, "grid_points must be >= 1");

  std::vector<double> dist;
  dist.reserve(static_cast<size_t>(s) * (s - 1) / 2);
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j) dist.push_back((X.col(i) - X.col(j)).norm());
  std::sort(dist.begin(), dist.end());
  const double max_dist = dist.back();
  require(max_dist > 0.0, ErrorCode::BadArgument, "all points coincide");
  const double total = static_cast<double>(dist.size());

  CorrDimEstimate est;
  est.eps_grid.resize(grid_points + 1);
  est.p_cd.resize(grid_points + 1);
  est.delta_sd.setConstant(grid_points + 1, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i <= grid_points; ++i) {
    const double eps = max_dist * i / grid_points;
    est.eps_grid[i] = eps;
    const auto count = std::upper_bound(dist.begin(), dist.end(), eps) - dist.begin();
    est.p_cd[i] = static_cast<double>(count) / total;
  }
  for (int i = 0; i < grid_points; ++i) {
    if (est.eps_grid[i] <= 0.0 || est.p_cd[i] <= 0.0 || est.p_cd[i + 1] <= 0.0) continue;
    est.delta_sd[i] = (std::log(est.p_cd[i + 1]) - std::log(est.p_cd[i])) /
                      (std::log(est.eps_grid[i + 1]) - std::log(est.eps_grid[i]));
  }
  return est;
}

}  // namespace mor
