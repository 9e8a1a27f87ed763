#include "mor/pod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mor/errors.hpp"
#include "mor/log.hpp"

namespace mor {

namespace {

// deterministic sign: flip so the largest-magnitude entry is positive
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

}  // namespace

int numerical_rank(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() == 0) return 0;
  const double floor = 1e-12 * eigenvalues[0];
  int rank = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] > 0.0 && eigenvalues[i] >= floor) ++rank;
  return rank;
}

void eigenvalue_decay(const Eigen::MatrixXd& U, Eigen::VectorXd& eigenvalues,
                      Eigen::VectorXd& cum_fraction) {
  const Eigen::Index s = U.cols();
  require(s >= 2, ErrorCode::BadArgument, "need at least 2 snapshots");
  Eigen::MatrixXd C = (U.transpose() * U) / static_cast<double>(s - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
  require(eig.info() == Eigen::Success, ErrorCode::SolverBreakdown, "covariance eigensolve failed");
  eigenvalues = eig.eigenvalues().reverse();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    require(eigenvalues[i] >= -1e-12, ErrorCode::SolverBreakdown,
            "covariance eigenvalue " + std::to_string(eigenvalues[i]) + " below -1e-12");
    if (eigenvalues[i] < 0.0) eigenvalues[i] = 0.0;
  }
  const double total = eigenvalues.sum();
  require(total > 0.0, ErrorCode::RankDeficient, "all snapshots are zero");
  cum_fraction.resize(eigenvalues.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    acc += eigenvalues[i];
    cum_fraction[i] = acc / total;
  }
}

PodBasis snapshot_pod(const Eigen::MatrixXd& U, const DimSpec& dim) {
  const Eigen::Index s = U.cols();
  require(s >= 2, ErrorCode::BadArgument, "need at least 2 snapshots");
  Eigen::MatrixXd C = (U.transpose() * U) / static_cast<double>(s - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
  require(eig.info() == Eigen::Success, ErrorCode::SolverBreakdown, "covariance eigensolve failed");

  PodBasis basis;
  basis.eigenvalues = eig.eigenvalues().reverse();
  Eigen::MatrixXd V = eig.eigenvectors().rowwise().reverse();
  for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i) {
    require(basis.eigenvalues[i] >= -1e-12, ErrorCode::SolverBreakdown,
            "covariance eigenvalue " + std::to_string(basis.eigenvalues[i]) + " below -1e-12");
    if (basis.eigenvalues[i] < 0.0) basis.eigenvalues[i] = 0.0;
    fix_sign(V.col(i));
  }
  const double total = basis.eigenvalues.sum();
  require(total > 0.0, ErrorCode::RankDeficient, "all snapshots are zero");
  basis.cum_fraction.resize(s);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    acc += basis.eigenvalues[i];
    basis.cum_fraction[i] = acc / total;
  }

  const int rank = numerical_rank(basis.eigenvalues);
  int d;
  if (dim.is_fixed()) {
    d = dim.d;
    require(d >= 1, ErrorCode::BadArgument, "d must be >= 1");
    if (d > rank)
      raise(ErrorCode::RankDeficient, "requested d=" + std::to_string(d) +
                                          " exceeds numerical rank " + std::to_string(rank));
  } else {
    require(dim.ratio > 0.0 && dim.ratio <= 1.0, ErrorCode::BadArgument,
            "information ratio must lie in (0,1]");
    d = rank;
    for (Eigen::Index i = 0; i < s; ++i)
      if (basis.cum_fraction[i] > dim.ratio) {
        d = static_cast<int>(i) + 1;
        break;
      }
    d = std::min(d, rank);
  }

  basis.d = d;
  basis.psi.resize(U.rows(), d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd mode = U * V.col(i);
    const double norm = mode.norm();
    require(norm > 0.0, ErrorCode::RankDeficient, "zero mode at index " + std::to_string(i));
    basis.psi.col(i) = mode / norm;
  }
  return basis;
}

Clustering kmeans_lloyd(const Eigen::MatrixXd& U, int k, RngStream& rng, int min_core,
                        int restart_budget) {
  const int s = static_cast<int>(U.cols());
  require(k >= 1 && k <= s, ErrorCode::BadArgument, "k must lie in [1, s]");
  require(min_core >= 1, ErrorCode::BadArgument, "min_core must be >= 1");

  for (int attempt = 0; attempt < restart_budget; ++attempt) {
    // fresh random initial centroids: k distinct snapshot columns
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < k)
      chosen.insert(static_cast<int>(rng.below(static_cast<std::uint64_t>(s))));
    Eigen::MatrixXd centroids(U.rows(), k);
    {
      int j = 0;
      for (int c : chosen) centroids.col(j++) = U.col(c);
    }

    std::vector<int> assignment(static_cast<size_t>(s), -1);
    bool degenerate = false;
    for (int iter = 0; iter < 500; ++iter) {
      bool changed = false;
      for (int i = 0; i < s; ++i) {
        // ties keep the lowest centroid index since j ascends with strict <
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
          const double dist = (U.col(i) - centroids.col(j)).squaredNorm();
          if (dist < best_d) {
            best_d = dist;
            best = j;
          }
        }
        if (assignment[static_cast<size_t>(i)] != best) {
          assignment[static_cast<size_t>(i)] = best;
          changed = true;
        }
      }
      std::vector<int> counts(static_cast<size_t>(k), 0);
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(U.rows(), k);
      for (int i = 0; i < s; ++i) {
        sums.col(assignment[static_cast<size_t>(i)]) += U.col(i);
        ++counts[static_cast<size_t>(assignment[static_cast<size_t>(i)])];
      }
      for (int j = 0; j < k; ++j) {
        if (counts[static_cast<size_t>(j)] == 0) {
          degenerate = true;
          break;
        }
        centroids.col(j) = sums.col(j) / counts[static_cast<size_t>(j)];
      }
      if (degenerate || !changed) break;
    }
    if (degenerate) continue;

    Clustering result;
    result.centroids = centroids;
    result.assignment = assignment;
    result.clusters.assign(static_cast<size_t>(k), {});
    for (int i = 0; i < s; ++i)
      result.clusters[static_cast<size_t>(assignment[static_cast<size_t>(i)])].push_back(i);
    bool ok = true;
    for (const auto& c : result.clusters)
      if (static_cast<int>(c.size()) < min_core) ok = false;
    if (ok) {
      MOR_DEBUG("kmeans converged on attempt " << attempt + 1);
      return result;
    }
  }
  raise(ErrorCode::ClusteringFailed, "no clustering with core size >= " +
                                         std::to_string(min_core) + " within " +
                                         std::to_string(restart_budget) + " restarts");
}

std::vector<std::vector<int>> enlarge_clusters(const Eigen::MatrixXd& U,
                                               const Eigen::MatrixXd& centroids,
                                               const std::vector<std::vector<int>>& clusters,
                                               const ClusterBounds& bounds) {
  const int s = static_cast<int>(U.cols());
  std::vector<std::vector<int>> out;
  out.reserve(clusters.size());
  for (size_t j = 0; j < clusters.size(); ++j) {
    const int size = static_cast<int>(clusters[j].size());
    int target = std::max(
        bounds.min_size,
        std::min(size + static_cast<int>(std::ceil(bounds.r * size)), bounds.max_size));
    target = std::min(target, s);
    target = std::max(target, size);  // enlargement only adds members

    std::vector<char> member(static_cast<size_t>(s), 0);
    for (int i : clusters[j]) member[static_cast<size_t>(i)] = 1;
    // non-members ranked by distance to the centroid, ties by lowest index
    std::vector<std::pair<double, int>> cand;
    for (int i = 0; i < s; ++i)
      if (!member[static_cast<size_t>(i)])
        cand.emplace_back((U.col(i) - centroids.col(static_cast<Eigen::Index>(j))).norm(), i);
    std::sort(cand.begin(), cand.end());

    std::vector<int> grown = clusters[j];
    for (int add = 0; add < target - size; ++add) grown.push_back(cand[static_cast<size_t>(add)].second);
    std::sort(grown.begin(), grown.end());
    out.push_back(std::move(grown));
  }
  return out;
}

LpodModel lpod_offline(const Eigen::MatrixXd& U, const LpodParams& params, const DimSpec& dim,
                       RngStream& rng) {
  Clustering clustering = kmeans_lloyd(U, params.k, rng, params.min_core);
  LpodModel model;
  model.centroids = clustering.centroids;
  model.core_clusters = clustering.clusters;
  model.clusters = enlarge_clusters(U, clustering.centroids, clustering.clusters, params.bounds);
  model.bases.reserve(model.clusters.size());
  for (size_t j = 0; j < model.clusters.size(); ++j) {
    const auto& members = model.clusters[j];
    Eigen::MatrixXd centered(U.rows(), static_cast<Eigen::Index>(members.size()));
    for (size_t i = 0; i < members.size(); ++i)
      centered.col(static_cast<Eigen::Index>(i)) =
          U.col(members[i]) - model.centroids.col(static_cast<Eigen::Index>(j));
    try {
      model.bases.push_back(snapshot_pod(centered, dim));
    } catch (const Error& e) {
      raise(e.code(), "cluster " + std::to_string(j) + ": " + e.detail());
    }
  }
  return model;
}

}  // namespace mor
