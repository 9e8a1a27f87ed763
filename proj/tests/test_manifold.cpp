#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "mor/errors.hpp"
#include "mor/manifold.hpp"
#include "mor/rng.hpp"

using namespace mor;

namespace {

Eigen::MatrixXd line_points() {
  Eigen::MatrixXd X(1, 3);
  X << 0.0, 1.0, 3.0;
  return X;
}

GraphParams knn(GraphMethod method, int k, double t = std::numeric_limits<double>::infinity()) {
  GraphParams p;
  p.method = method;
  p.k = k;
  p.t = t;
  return p;
}

GraphParams eps_ball(double eps, double t = std::numeric_limits<double>::infinity()) {
  GraphParams p;
  p.method = GraphMethod::EpsBall;
  p.eps = eps;
  p.t = t;
  return p;
}

// largest principal angle between the row spaces of two d x s matrices
double subspace_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  auto orth = [](const Eigen::MatrixXd& M) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M.transpose());
    return Eigen::MatrixXd(qr.householderQ() *
                           Eigen::MatrixXd::Identity(M.cols(), M.rows()));
  };
  Eigen::MatrixXd Qa = orth(A), Qb = orth(B);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Qa.transpose() * Qb);
  const double c = std::min(1.0, svd.singularValues().minCoeff());
  return std::acos(c);
}

}  // namespace

TEST_CASE("symmetric knn joins one-directional nearest neighbours") {
  NeighborGraph g = build_graph(line_points(), knn(GraphMethod::SymmetricKnn, 1));
  CHECK(g.neighbors[0] == std::vector<int>({1}));
  CHECK(g.neighbors[1] == std::vector<int>({0, 2}));
  CHECK(g.neighbors[2] == std::vector<int>({1}));
  CHECK(g.weights(0, 1) == 1.0);  // binary at t = inf
  CHECK(g.weights(1, 2) == 1.0);
  CHECK(g.weights(0, 2) == 0.0);
  CHECK((g.weights - g.weights.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.weights.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mutual knn drops one-directional edges and may disconnect") {
  try {
    build_graph(line_points(), knn(GraphMethod::MutualKnn, 1));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DisconnectedGraph);
    CHECK(e.detail().find("2 components") != std::string::npos);
  }
  // k=2 keeps everything mutually adjacent
  NeighborGraph g = build_graph(line_points(), knn(GraphMethod::MutualKnn, 2));
  CHECK(g.neighbors[0] == std::vector<int>({1, 2}));
  CHECK(g.neighbors[2] == std::vector<int>({0, 1}));
}

TEST_CASE("eps ball includes boundary distances and flags isolated nodes") {
  // the 1-2 gap is exactly eps: an exclusive bound would disconnect the graph
  NeighborGraph g = build_graph(line_points(), eps_ball(2.0));
  CHECK(g.neighbors[0] == std::vector<int>({1}));
  CHECK(g.neighbors[1] == std::vector<int>({0, 2}));
  try {
    build_graph(line_points(), eps_ball(1.0));  // point at 3 isolated
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DisconnectedGraph);
    CHECK(e.detail().find("2 components") != std::string::npos);
  }
  CHECK_THROWS_AS(build_graph(line_points(), eps_ball(0.0)), Error);
}

TEST_CASE("zero-degree guard fires on hand-built graphs") {
  NeighborGraph g;
  g.weights = Eigen::MatrixXd::Zero(4, 4);
  g.weights(0, 1) = g.weights(1, 0) = 1.0;
  g.weights(1, 2) = g.weights(2, 1) = 1.0;
  g.weights(2, 0) = g.weights(0, 2) = 1.0;  // node 3 untouched
  g.neighbors = {{1, 2}, {0, 2}, {0, 1}, {}};
  try {
    lem_embed(g, 1);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroDegreeNode);
    CHECK(e.detail().find("3") != std::string::npos);
  }
}

TEST_CASE("gaussian weights follow exp(-d^2/t)") {
  NeighborGraph g = build_graph(line_points(), knn(GraphMethod::SymmetricKnn, 1, 4.0));
  CHECK(g.weights(0, 1) == doctest::Approx(std::exp(-1.0 / 4.0)).epsilon(1e-12));
  CHECK(g.weights(1, 2) == doctest::Approx(std::exp(-4.0 / 4.0)).epsilon(1e-12));
  // binary weights at t = inf
  NeighborGraph b = build_graph(line_points(), knn(GraphMethod::SymmetricKnn, 1));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK((b.weights(i, j) == 0.0 || b.weights(i, j) == 1.0));
}

TEST_CASE("knn tie-breaking prefers the lowest index") {
  // points 1 and 2 are both at distance 1 from point 0, but only point 0
  // ever selects point 1 (its own nearest is point 3), so the 0-1 edge
  // exists exactly when the tie resolves to the lower index
  Eigen::MatrixXd X(1, 4);
  X << 0.0, 1.0, -1.0, 1.75;
  NeighborGraph g = build_graph(X, knn(GraphMethod::SymmetricKnn, 1));
  CHECK(g.weights(0, 1) == 1.0);
  CHECK(g.neighbors[0] == std::vector<int>({1, 2}));
  CHECK(g.neighbors[3] == std::vector<int>({1}));
}

TEST_CASE("LEM on a path graph gives a monotone second eigenvector") {
  Eigen::MatrixXd X(1, 3);
  X << 0.0, 1.0, 2.0;
  NeighborGraph g = build_graph(X, knn(GraphMethod::SymmetricKnn, 1));
  Embedding emb = lem_embed(g, 1);
  REQUIRE(emb.Y.rows() == 1);
  REQUIRE(emb.Y.cols() == 3);
  // trivial eigenvalue first and tiny
  CHECK(emb.eigenvalues[0] < 1e-10);
  CHECK(emb.eigenvalues[1] > 1e-10);
  // strict monotone coordinates along the path
  const double a = emb.Y(0, 0), b = emb.Y(0, 1), c = emb.Y(0, 2);
  CHECK(((a < b && b < c) || (a > b && b > c)));
}

TEST_CASE("LEM spectrum of the complete graph is flat") {
  Eigen::MatrixXd X(2, 5);
  X << 0.0, 1.0, 0.0, -1.0, 0.5, 0.0, 0.0, 1.0, -0.5, -1.0;
  NeighborGraph g = build_graph(X, knn(GraphMethod::SymmetricKnn, 4));
  Embedding emb = lem_embed(g, 3);
  // normalised Laplacian of K_5: eigenvalue 0 then 5/4 repeated
  for (int i = 1; i <= 4; ++i) CHECK(emb.eigenvalues[i] == doctest::Approx(1.25).epsilon(1e-10));
}

TEST_CASE("LEM rows are unit vectors, D-orthogonal to each other and to constants") {
  RngStream rng(3, "lem");
  Eigen::MatrixXd X(3, 12);
  for (int j = 0; j < 12; ++j) X.col(j) = rng.normal_vector(3);
  NeighborGraph g = build_graph(X, knn(GraphMethod::SymmetricKnn, 4, 2.0));
  Embedding emb = lem_embed(g, 4);
  Eigen::MatrixXd D = g.degrees().asDiagonal();
  Eigen::MatrixXd gram = emb.Y * D * emb.Y.transpose();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(std::abs(gram(i, j)) < 1e-8);
  for (int i = 0; i < 4; ++i) CHECK(emb.Y.row(i).norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK((emb.Y * D * Eigen::VectorXd::Ones(12)).cwiseAbs().maxCoeff() < 1e-8);
  // deterministic sign: largest-magnitude entry of each row is positive
  for (int r = 0; r < 4; ++r) {
    Eigen::Index imax;
    emb.Y.row(r).cwiseAbs().maxCoeff(&imax);
    CHECK(emb.Y(r, imax) > 0.0);
  }
}

TEST_CASE("LEM matches a dense generalised eigensolver") {
  RngStream rng(5, "lem");
  Eigen::MatrixXd X(4, 15);
  for (int j = 0; j < 15; ++j) X.col(j) = rng.normal_vector(4);
  NeighborGraph g = build_graph(X, knn(GraphMethod::SymmetricKnn, 5, 3.0));
  const int d = 3;
  Embedding emb = lem_embed(g, d);

  Eigen::MatrixXd D = g.degrees().asDiagonal();
  Eigen::MatrixXd L = D - g.weights;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(L, D);
  Eigen::MatrixXd ref = eig.eigenvectors().middleCols(1, d).transpose();
  CHECK(subspace_angle(emb.Y, ref) < 1e-8);
  for (int i = 0; i < d; ++i)
    CHECK(emb.eigenvalues[i + 1] == doctest::Approx(eig.eigenvalues()[i + 1]).epsilon(1e-10));
}

TEST_CASE("LEM dimension cap and zero-degree guard") {
  Eigen::MatrixXd X(1, 4);
  X << 0.0, 1.0, 2.0, 3.0;
  NeighborGraph g = build_graph(X, knn(GraphMethod::SymmetricKnn, 1));
  CHECK_NOTHROW(lem_embed(g, 2));  // d = s-2 is the cap
  CHECK_THROWS_AS(lem_embed(g, 3), Error);
  CHECK_THROWS_AS(lem_embed(g, 0), Error);
}

TEST_CASE("LLE weights reproduce points from their neighbours") {
  // midpoint: both neighbours weighted one half
  Eigen::MatrixXd X(1, 3);
  X << 0.0, 1.0, 2.0;
  NeighborGraph g = build_graph(X, knn(GraphMethod::SymmetricKnn, 1));
  Eigen::MatrixXd W = lle_weights(X, g);
  CHECK(W(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(W(1, 2) == doctest::Approx(0.5).epsilon(1e-12));
  // single-neighbour rows collapse to weight one
  CHECK(W(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(W(2, 1) == doctest::Approx(1.0).epsilon(1e-12));
  // every row sums to one
  for (int i = 0; i < 3; ++i) CHECK(W.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(W.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("LLE weights rows always sum to one on random clouds") {
  RngStream rng(7, "lle");
  Eigen::MatrixXd X(3, 20);
  for (int j = 0; j < 20; ++j) X.col(j) = rng.normal_vector(3);
  NeighborGraph g = build_graph(X, knn(GraphMethod::SymmetricKnn, 6));
  Eigen::MatrixXd W = lle_weights(X, g);
  for (int i = 0; i < 20; ++i) {
    CHECK(W.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int j : g.neighbors[static_cast<size_t>(i)]) CHECK(W(i, j) != 0.0);
  }
}

TEST_CASE("LLE embedding matches the dense eigensolver on a ring") {
  Eigen::MatrixXd X(2, 8);
  for (int j = 0; j < 8; ++j) {
    const double a = 2.0 * M_PI * j / 8.0;
    X(0, j) = std::cos(a);
    X(1, j) = std::sin(a);
  }
  NeighborGraph g = build_graph(X, knn(GraphMethod::SymmetricKnn, 2));
  Eigen::MatrixXd W = lle_weights(X, g);
  const int d = 2;
  Embedding emb = lle_embed(W, d);

  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(8, 8);
  Eigen::MatrixXd M = (I - W).transpose() * (I - W);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
  Eigen::MatrixXd ref = eig.eigenvectors().middleCols(1, d).transpose();
  CHECK(subspace_angle(emb.Y, ref) < 1e-8);

  // rows orthonormal for the symmetric problem
  Eigen::MatrixXd gram = emb.Y * emb.Y.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("global linearisation reproduces exact linear data") {
  // Y = [0 | I]: centered embedding is the identity block, so psi
  // recovers the nonzero snapshot columns directly
  const int m = 6, s = 4;
  RngStream rng(9, "glob");
  Eigen::MatrixXd U(m, s);
  U.col(0).setZero();
  for (int j = 1; j < s; ++j) U.col(j) = rng.normal_vector(m);
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(s - 1, s);
  Y.rightCols(s - 1).setIdentity();
  GlobalMap map = global_linearise(U, Y);
  CHECK((map.psi - U.rightCols(s - 1)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((map.y0 - Y.col(0)).cwiseAbs().maxCoeff() == 0.0);
  // QR factors: orthonormal columns, psi = psi_perp R, positive diagonal
  CHECK((map.psi_perp.transpose() * map.psi_perp -
         Eigen::MatrixXd::Identity(s - 1, s - 1))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK((map.psi_perp * map.R - map.psi).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < s - 1; ++i) CHECK(map.R(i, i) > 0.0);
}

TEST_CASE("one-dimensional global map scales the snapshot direction") {
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(4, 2);
  U(0, 1) = 2.0;
  Eigen::MatrixXd Y(1, 2);
  Y << 0.0, 1.0;
  GlobalMap map = global_linearise(U, Y);
  CHECK((map.psi - 2.0 * Eigen::MatrixXd::Identity(4, 1)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((map.psi_perp - Eigen::MatrixXd::Identity(4, 1)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(map.R(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("global map is the least-squares optimum") {
  RngStream rng(11, "glob");
  const int m = 10, d = 3, s = 12;
  Eigen::MatrixXd U(m, s), Y(d, s);
  for (int j = 0; j < s; ++j) {
    U.col(j) = rng.normal_vector(m);
    Y.col(j) = rng.normal_vector(d);
  }
  GlobalMap map = global_linearise(U, Y);
  Eigen::MatrixXd Yc = Y.colwise() - Y.col(0);
  const double best = (U - map.psi * Yc).norm();
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd A(m, d);
    for (int j = 0; j < d; ++j) A.col(j) = rng.normal_vector(m);
    CHECK((U - A * Yc).norm() >= best - 1e-9);
  }
}

TEST_CASE("rank-deficient embeddings are rejected") {
  Eigen::MatrixXd U(4, 3);
  U.setRandom();
  Eigen::MatrixXd Y(2, 3);
  Y << 0.0, 1.0, 2.0, 0.0, 2.0, 4.0;  // second row is twice the first
  try {
    global_linearise(U, Y);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficientEmbedding);
  }
}

TEST_CASE("nearest neighbours in reduced space sort like the oracle") {
  RngStream rng(13, "near");
  const int d = 2, s = 30;
  Eigen::MatrixXd Y(d, s);
  for (int j = 0; j < s; ++j) Y.col(j) = rng.normal_vector(d);
  Eigen::VectorXd y = rng.normal_vector(d);
  for (int n : {1, 5, 30}) {
    std::vector<int> got = nearest_in_reduced(y, Y, n);
    std::vector<int> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double da = (Y.col(a) - y).norm(), db = (Y.col(b) - y).norm();
      return da < db;
    });
    order.resize(static_cast<size_t>(n));
    CHECK(got == order);
  }

  // exact ties resolve to the lowest index
  Eigen::MatrixXd T(1, 3);
  T << 1.0, -1.0, 1.0;
  CHECK(nearest_in_reduced(Eigen::VectorXd::Zero(1), T, 2) == std::vector<int>({0, 1}));
}

TEST_CASE("local tangent matches the hand-worked line fit") {
  // embedding 0,1,2 carries ambient points (0,0),(1,2),(2,4): slope (1,2)
  Eigen::MatrixXd Y(1, 3);
  Y << 0.0, 1.0, 2.0;
  Eigen::MatrixXd U(2, 3);
  U << 0.0, 1.0, 2.0, 0.0, 2.0, 4.0;
  LocalTangent tangent = local_linearise(Eigen::VectorXd::Constant(1, 1.0), Y, U, 3);
  CHECK(tangent.phi(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tangent.phi(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tangent.y_center(0) == doctest::Approx(1.0));
  CHECK(tangent.neighbor_ids.size() == 3);
}

TEST_CASE("local tangent equals the brute-force affine normal equations") {
  RngStream rng(17, "loc");
  const int m = 7, d = 2, s = 25, n = 9;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd U(m, s), Y(d, s);
    for (int j = 0; j < s; ++j) {
      U.col(j) = rng.normal_vector(m);
      Y.col(j) = rng.normal_vector(d);
    }
    Eigen::VectorXd y = rng.normal_vector(d);
    LocalTangent tangent = local_linearise(y, Y, U, n);

    // brute force: fit U_N ~ c 1^T + Phi Y_N by stacked normal equations
    std::vector<int> ids = nearest_in_reduced(y, Y, n);
    CHECK(tangent.neighbor_ids == ids);
    Eigen::MatrixXd design(n, d + 1);
    Eigen::MatrixXd rhs(n, m);
    for (int i = 0; i < n; ++i) {
      design(i, 0) = 1.0;
      design.row(i).tail(d) = Y.col(ids[static_cast<size_t>(i)]).transpose();
      rhs.row(i) = U.col(ids[static_cast<size_t>(i)]).transpose();
    }
    Eigen::MatrixXd sol =
        (design.transpose() * design).ldlt().solve(design.transpose() * rhs);
    Eigen::MatrixXd phi_ref = sol.bottomRows(d).transpose();  // m x d
    CHECK((tangent.phi - phi_ref).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("local tangent reproduces exact affine maps and its QR factors") {
  RngStream rng(19, "loc");
  const int m = 8, d = 3, s = 20;
  Eigen::MatrixXd A(m, d);
  for (int j = 0; j < d; ++j) A.col(j) = rng.normal_vector(m);
  Eigen::VectorXd b = rng.normal_vector(m);
  Eigen::MatrixXd Y(d, s);
  for (int j = 0; j < s; ++j) Y.col(j) = rng.normal_vector(d);
  Eigen::MatrixXd U = (A * Y).colwise() + b;

  LocalTangent tangent = local_linearise(Y.col(4), Y, U, 10);
  CHECK((tangent.phi - A).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((tangent.phi_perp * tangent.R_perp - tangent.phi).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((tangent.phi_perp.transpose() * tangent.phi_perp -
         Eigen::MatrixXd::Identity(d, d))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  for (int i = 0; i < d; ++i) CHECK(tangent.R_perp(i, i) > 0.0);
}

TEST_CASE("degenerate neighbourhoods raise SingularNeighborhood") {
  Eigen::MatrixXd Y(2, 6);
  Y.setZero();  // all embedded points identical
  Eigen::MatrixXd U(4, 6);
  U.setRandom();
  try {
    local_linearise(Eigen::VectorXd::Zero(2), Y, U, 4);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularNeighborhood);
  }

  // n <= d is structurally rank-deficient after centering
  RngStream rng(23, "loc");
  Eigen::MatrixXd Y2(2, 6), U2(4, 6);
  for (int j = 0; j < 6; ++j) {
    Y2.col(j) = rng.normal_vector(2);
    U2.col(j) = rng.normal_vector(4);
  }
  CHECK_THROWS_AS(local_linearise(Eigen::VectorXd::Zero(2), Y2, U2, 2), Error);
}

TEST_CASE("correlation integral of two points is a step at their distance") {
  Eigen::MatrixXd X(1, 2);
  X << 0.0, 3.0;
  CorrDimEstimate est = correlation_dimension(X, 10);
  REQUIRE(est.eps_grid.size() == 11);
  CHECK(est.eps_grid[0] == 0.0);
  CHECK(est.eps_grid[10] == doctest::Approx(3.0));
  for (int i = 0; i < 10; ++i) CHECK(est.p_cd[i] == (est.eps_grid[i] >= 3.0 ? 1.0 : 0.0));
  CHECK(est.p_cd[10] == 1.0);
}

TEST_CASE("correlation integral is monotone, bounded and permutation invariant") {
  RngStream rng(29, "cd");
  Eigen::MatrixXd X(3, 40);
  for (int j = 0; j < 40; ++j) X.col(j) = rng.normal_vector(3);
  CorrDimEstimate est = correlation_dimension(X, 50);
  for (Eigen::Index i = 0; i < est.p_cd.size(); ++i) {
    CHECK(est.p_cd[i] >= 0.0);
    CHECK(est.p_cd[i] <= 1.0);
    if (i > 0) CHECK(est.p_cd[i] >= est.p_cd[i - 1]);
  }
  CHECK(est.p_cd[est.p_cd.size() - 1] == 1.0);

  // column order cannot matter
  Eigen::MatrixXd shuffled = X;
  for (Eigen::Index i = 40; i > 1; --i)
    shuffled.col(i - 1).swap(shuffled.col(static_cast<Eigen::Index>(rng.below(i))));
  CorrDimEstimate est2 = correlation_dimension(shuffled, 50);
  CHECK((est.p_cd - est2.p_cd).cwiseAbs().maxCoeff() == 0.0);
  CHECK((est.eps_grid - est2.eps_grid).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scale-dependent slope is defined exactly where it can be") {
  RngStream rng(31, "cd");
  Eigen::MatrixXd X(2, 25);
  for (int j = 0; j < 25; ++j) X.col(j) = rng.normal_vector(2);
  CorrDimEstimate est = correlation_dimension(X, 40);
  REQUIRE(est.delta_sd.size() == est.eps_grid.size());
  CHECK(std::isnan(est.delta_sd[0]));                          // log 0
  CHECK(std::isnan(est.delta_sd[est.delta_sd.size() - 1]));    // no forward step
  for (Eigen::Index i = 1; i + 1 < est.delta_sd.size(); ++i) {
    if (est.p_cd[i] == 0.0)
      CHECK(std::isnan(est.delta_sd[i]));
    else if (!std::isnan(est.delta_sd[i]))
      CHECK(est.delta_sd[i] >= 0.0);
  }
}

TEST_CASE("correlation dimension needs at least two points") {
  CHECK_THROWS_AS(correlation_dimension(Eigen::MatrixXd::Zero(3, 1), 10), Error);
}

TEST_CASE("graph and embed method names round-trip") {
  for (auto m : {GraphMethod::EpsBall, GraphMethod::SymmetricKnn, GraphMethod::MutualKnn})
    CHECK(graph_method_from_name(graph_method_name(m)) == m);
  for (auto m : {EmbedMethod::Lem, EmbedMethod::Lle})
    CHECK(embed_method_from_name(embed_method_name(m)) == m);
  CHECK_THROWS_AS(graph_method_from_name("voronoi"), Error);
  CHECK_THROWS_AS(embed_method_from_name("umap"), Error);
}
