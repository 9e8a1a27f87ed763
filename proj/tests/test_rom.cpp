#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mor/errors.hpp"
#include "mor/model_io.hpp"
#include "mor/rom.hpp"

using namespace mor;

namespace {

// one porous RVE, one training path and its full-order solution, shared by
// every ROM test so the expensive Newton solves run once
struct RomFixture {
  Mesh mesh;
  PeriodicPairing pairing;
  MaterialParams mat = from_youngs(1000.0, 0.2);
  QuadRule rule = QuadRule::tet_degree2();
  SolverSettings tight;    // replay comparisons leave solver fuzz well below 1e-6
  std::vector<Eigen::Matrix3d> path;
  Eigen::MatrixXd states;  // D x steps full-order fluctuations at tight residual
  Eigen::MatrixXd U;       // D x (steps+1) snapshots, zero column first
  int rank = 0;

  RomFixture() {
    mesh = carve_pores(generate_cube_mesh(6.0, 3), PoreSpec{{{2.0, 2.0, 2.0}}, 1.5});
    pairing = build_periodic_pairing(mesh);
    Eigen::Matrix3d A, B;
    A << 0.020, 0.010, 0.000, 0.000, -0.012, 0.006, 0.000, 0.000, 0.016;
    B << 0.000, -0.004, 0.002, 0.003, 0.000, 0.000, 0.000, 0.005, -0.003;
    const int steps = 5;
    for (int n = 1; n <= steps; ++n)
      path.push_back(n * A + (n * n / double(steps)) * B);
    tight.res_max = 1e-8;
    FemSystem system(mesh, pairing, mat, rule);
    FullSolveResult full = newton_solve_reduced(system, path, tight);
    states = full.states;
    U.resize(states.rows(), steps + 1);
    U.col(0).setZero();
    U.rightCols(steps) = states;
    Eigen::VectorXd eig, cum;
    eigenvalue_decay(U, eig, cum);
    rank = numerical_rank(eig);
  }

  FemSystem system() const { return FemSystem(mesh, pairing, mat, rule); }
};

const RomFixture& fix() {
  static RomFixture f;
  return f;
}

double replay_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < want.cols(); ++j)
    worst = std::max(worst, (got.col(j) - want.col(j)).norm() / want.col(j).norm());
  return worst;
}

GraphParams small_graph(int k = 3) {
  GraphParams g;
  g.method = GraphMethod::SymmetricKnn;
  g.k = k;
  return g;
}

std::vector<Eigen::Matrix3d> zero_path(int steps) {
  return std::vector<Eigen::Matrix3d>(static_cast<size_t>(steps), Eigen::Matrix3d::Zero());
}

struct TempDir {
  std::filesystem::path dir;
  explicit TempDir(const std::string& tag) {
    dir = std::filesystem::temp_directory_path() / ("mor_rom_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
};

}  // namespace

TEST_CASE("POD at full snapshot rank replays the training path") {
  const RomFixture& f = fix();
  PodBasis pod = snapshot_pod(f.U, DimSpec::fixed(f.rank));
  FemSystem sys = f.system();
  RomSolveResult rom = rom_solve_pod(pod, sys, f.path, f.tight);
  REQUIRE(rom.states.cols() == f.states.cols());
  CHECK(replay_error(rom.states, f.states) < 1e-6);
  for (const StepTrace& t : rom.trace) {
    CHECK(t.residual < f.tight.res_max);
    CHECK(t.iterations <= f.tight.max_iterations);
  }
}

TEST_CASE("truncated POD is less accurate but still converges") {
  const RomFixture& f = fix();
  PodBasis full = snapshot_pod(f.U, DimSpec::fixed(f.rank));
  PodBasis small = snapshot_pod(f.U, DimSpec::fixed(2));
  FemSystem sys_full = f.system(), sys_small = f.system();
  const double e_full =
      replay_error(rom_solve_pod(full, sys_full, f.path, SolverSettings{}).states, f.states);
  const double e_small =
      replay_error(rom_solve_pod(small, sys_small, f.path, SolverSettings{}).states, f.states);
  CHECK(e_small > e_full);
  CHECK(e_small < 0.5);  // two modes still capture the bulk of the response
}

TEST_CASE("zero load path converges immediately to the zero state") {
  const RomFixture& f = fix();
  PodBasis pod = snapshot_pod(f.U, DimSpec::fixed(2));
  FemSystem sys = f.system();
  RomSolveResult rom = rom_solve_pod(pod, sys, zero_path(3), SolverSettings{});
  CHECK(rom.states.cwiseAbs().maxCoeff() == 0.0);
  for (const StepTrace& t : rom.trace) {
    CHECK(t.iterations == 1);
    CHECK(t.residual == 0.0);
  }
}

TEST_CASE("converged reduced residual does not imply a converged full residual") {
  const RomFixture& f = fix();
  PodBasis pod = snapshot_pod(f.U, DimSpec::fixed(2));
  FemSystem sys = f.system();
  RomSolveResult rom = rom_solve_pod(pod, sys, f.path, SolverSettings{});
  FemSystem check = f.system();
  check.assemble(rom.states.col(f.path.size() - 1), f.path.back(), false);
  Eigen::VectorXd g = check.g();
  CHECK((pod.psi.transpose() * g).cwiseAbs().maxCoeff() < SolverSettings{}.res_max);
  CHECK(g.cwiseAbs().maxCoeff() > SolverSettings{}.res_max);  // truncation leaves residual
}

TEST_CASE("single-cluster LPOD reproduces plain POD on the centered snapshots") {
  const RomFixture& f = fix();
  RngStream rng(1, "lpod");
  LpodParams params;
  params.k = 1;
  params.min_core = 1;
  params.bounds = ClusterBounds{0.0, 1, 6};
  LpodModel lpod = lpod_offline(f.U, params, DimSpec::fixed(f.rank), rng);
  REQUIRE(lpod.bases.size() == 1);

  FemSystem sys = f.system();
  RomSolveResult got = rom_solve_lpod(lpod, sys, f.path, f.tight);
  CHECK(replay_error(got.states, f.states) < 1e-6);
  for (const StepTrace& t : got.trace) {
    // every iteration sits in the only cluster
    CHECK(t.cluster_seq.find_first_not_of("0;") == std::string::npos);
    CHECK_FALSE(t.zigzag);
  }
}

TEST_CASE("LPOD with full local ranks and spans replays the training path") {
  const RomFixture& f = fix();
  RngStream rng(7, "lpod");
  LpodParams params;
  params.k = 2;
  params.min_core = 2;
  // soften every cluster to full membership: the update is incremental, so
  // exact replay needs the warm-start state inside the active span too
  params.bounds = ClusterBounds{1.0, 2, static_cast<int>(f.U.cols())};
  LpodModel lpod = lpod_offline(f.U, params, DimSpec::info_ratio(1.0), rng);
  FemSystem sys = f.system();
  RomSolveResult rom = rom_solve_lpod(lpod, sys, f.path, f.tight);
  CHECK(replay_error(rom.states, f.states) < 1e-6);
  for (const StepTrace& t : rom.trace) CHECK_FALSE(t.cluster_seq.empty());
}

TEST_CASE("LPOD with partial overlap still replays to solver accuracy") {
  const RomFixture& f = fix();
  RngStream rng(7, "lpod");
  LpodParams params;
  params.k = 2;
  params.min_core = 2;
  params.bounds = ClusterBounds{0.5, 2, 6};  // each cluster misses one snapshot
  LpodModel lpod = lpod_offline(f.U, params, DimSpec::info_ratio(1.0), rng);
  FemSystem sys = f.system();
  RomSolveResult rom = rom_solve_lpod(lpod, sys, f.path, f.tight);
  CHECK(replay_error(rom.states, f.states) < 1e-5);
}

TEST_CASE("manifold ROM converges immediately on a zero path") {
  const RomFixture& f = fix();
  ManlModel manl = manl_offline(f.U, 2, small_graph(), EmbedMethod::Lem, 4);
  FemSystem sys = f.system();
  RomSolveResult rom = rom_solve_manl(manl, sys, zero_path(2), SolverSettings{});
  CHECK(rom.states.cwiseAbs().maxCoeff() == 0.0);
  for (const StepTrace& t : rom.trace) {
    CHECK(t.iterations == 1);
    CHECK(t.lin_count == 1);  // one tangent fit before the residual check
    CHECK(t.lin_qr_ms >= 0.0);
  }
}

TEST_CASE("manifold ROM tracks the training path") {
  const RomFixture& f = fix();
  for (EmbedMethod method : {EmbedMethod::Lem, EmbedMethod::Lle}) {
    ManlModel manl =
        manl_offline(f.U, 3, small_graph(), method, static_cast<int>(f.U.cols()));
    FemSystem sys = f.system();
    RomSolveResult rom = rom_solve_manl(manl, sys, f.path, SolverSettings{});
    CHECK(replay_error(rom.states, f.states) < 1e-2);
    for (const StepTrace& t : rom.trace) {
      CHECK(t.residual < SolverSettings{}.res_max);
      CHECK(t.lin_count >= t.iterations);  // one fit per assemble/check cycle
    }
  }
}

TEST_CASE("orthonormalised and raw tangents give the same displacements") {
  const RomFixture& f = fix();
  ManlModel with_qr = manl_offline(f.U, 3, small_graph(), EmbedMethod::Lem, 5, true);
  ManlModel no_qr = manl_offline(f.U, 3, small_graph(), EmbedMethod::Lem, 5, false);
  FemSystem sys_a = f.system(), sys_b = f.system();
  RomSolveResult a = rom_solve_manl(with_qr, sys_a, f.path, SolverSettings{});
  RomSolveResult b = rom_solve_manl(no_qr, sys_b, f.path, SolverSettings{});
  for (Eigen::Index j = 0; j < a.states.cols(); ++j)
    CHECK((a.states.col(j) - b.states.col(j)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("stage-1 compression at full rank preserves the embedding") {
  const RomFixture& f = fix();
  GraphParams g = small_graph();
  ManlModel single = manl_offline(f.U, 2, g, EmbedMethod::Lem, 4);
  TwoStageModel two = two_stage_offline(f.U, f.rank, 2, g, EmbedMethod::Lem, 4);

  // the orthonormal stage-1 basis is an isometry on the snapshot span, so
  // pairwise distances and hence the graph and its embedding are unchanged
  const int s = static_cast<int>(f.U.cols());
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      const double da = (f.U.col(i) - f.U.col(j)).norm();
      const double db = (two.Y_bar.col(i) - two.Y_bar.col(j)).norm();
      CHECK(da == doctest::Approx(db).epsilon(1e-8));
    }
  CHECK((single.embedding.Y - two.embedding.Y).cwiseAbs().maxCoeff() < 1e-8);

  FemSystem sys_a = f.system(), sys_b = f.system();
  RomSolveResult a = rom_solve_manl(single, sys_a, f.path, SolverSettings{});
  RomSolveResult b = rom_solve_two_stage(two, sys_b, f.path, SolverSettings{});
  for (Eigen::Index j = 0; j < a.states.cols(); ++j)
    CHECK((a.states.col(j) - b.states.col(j)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("two-stage offline validates the dimension ordering") {
  const RomFixture& f = fix();
  CHECK_THROWS_AS(two_stage_offline(f.U, 2, 2, small_graph(), EmbedMethod::Lem, 4), Error);
  CHECK_THROWS_AS(two_stage_offline(f.U, 2, 3, small_graph(), EmbedMethod::Lem, 4), Error);
}

TEST_CASE("degenerate neighbourhoods retry at doubled size") {
  const RomFixture& f = fix();
  ManlModel manl = manl_offline(f.U, 1, small_graph(), EmbedMethod::Lem, 4);
  // append a duplicate of the zero snapshot: the two nearest neighbours of
  // the starting point now coincide and the first tangent fit is singular
  const int s = static_cast<int>(f.U.cols());
  manl.U_ambient.conservativeResize(Eigen::NoChange, s + 1);
  manl.U_ambient.col(s) = f.U.col(0);
  Eigen::MatrixXd Y(manl.embedding.Y.rows(), s + 1);
  Y.leftCols(s) = manl.embedding.Y;
  Y.col(s) = manl.embedding.Y.col(0);
  manl.embedding.Y = Y;
  manl.n_lin = 2;

  FemSystem sys = f.system();
  RomSolveResult rom = rom_solve_manl(manl, sys, f.path, SolverSettings{});
  for (const StepTrace& t : rom.trace) CHECK(t.residual < SolverSettings{}.res_max);

  // with every embedded point identical no retry can help
  ManlModel hopeless = manl;
  hopeless.embedding.Y.setZero();
  FemSystem sys2 = f.system();
  try {
    rom_solve_manl(hopeless, sys2, f.path, SolverSettings{});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularNeighborhood);
    CHECK(e.detail().find("path 0, step 0") != std::string::npos);
  }
}

TEST_CASE("ambient dimension mismatches are rejected") {
  const RomFixture& f = fix();
  ManlModel manl = manl_offline(f.U, 2, small_graph(), EmbedMethod::Lem, 4);
  manl.U_ambient.conservativeResize(manl.U_ambient.rows() - 1, Eigen::NoChange);
  FemSystem sys = f.system();
  CHECK_THROWS_AS(rom_solve_manl(manl, sys, f.path, SolverSettings{}), Error);
  CHECK_THROWS_AS(rom_solve_pod(snapshot_pod(f.U, DimSpec::fixed(2)), sys, {}, SolverSettings{}),
                  Error);
}

TEST_CASE("iteration budget failures identify the path and step") {
  const RomFixture& f = fix();
  PodBasis pod = snapshot_pod(f.U, DimSpec::fixed(f.rank));
  SolverSettings strict;
  strict.max_iterations = 1;  // one residual check, no solves allowed
  FemSystem sys = f.system();
  try {
    rom_solve_pod(pod, sys, f.path, strict, 3);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
    CHECK(e.detail().find("path 3") != std::string::npos);
    CHECK(e.detail().find("step 0") != std::string::npos);
  }
}

TEST_CASE("dispatch through the model wrapper matches the direct calls") {
  const RomFixture& f = fix();
  RomModel model;
  model.kind = RomKind::Pod;
  model.pod = snapshot_pod(f.U, DimSpec::fixed(f.rank));
  FemSystem sys_a = f.system(), sys_b = f.system();
  RomSolveResult a = rom_solve(model, sys_a, f.path, SolverSettings{});
  RomSolveResult b = rom_solve_pod(model.pod, sys_b, f.path, SolverSettings{});
  CHECK((a.states - b.states).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("saved models load back and replay identically") {
  const RomFixture& f = fix();
  RngStream rng(11, "lpod");
  LpodParams lparams;
  lparams.k = 2;
  lparams.min_core = 2;
  lparams.bounds = ClusterBounds{0.5, 2, 6};

  RomModel models[4];
  models[0].kind = RomKind::Pod;
  models[0].pod = snapshot_pod(f.U, DimSpec::fixed(f.rank));
  models[1].kind = RomKind::Lpod;
  models[1].lpod = lpod_offline(f.U, lparams, DimSpec::info_ratio(1.0), rng);
  models[2].kind = RomKind::ManifoldLocal;
  models[2].manl = manl_offline(f.U, 2, small_graph(), EmbedMethod::Lle, 4, false);
  models[3].kind = RomKind::TwoStage;
  models[3].two_stage = two_stage_offline(f.U, f.rank, 2, small_graph(), EmbedMethod::Lem, 4);

  for (int i = 0; i < 4; ++i) {
    TempDir tmp("roundtrip_" + std::to_string(i));
    save_model(models[i], tmp.dir.string());
    RomModel loaded = load_model(tmp.dir.string());
    CHECK(loaded.kind == models[i].kind);
    FemSystem sys_a = f.system(), sys_b = f.system();
    RomSolveResult a = rom_solve(models[i], sys_a, f.path, SolverSettings{});
    RomSolveResult b = rom_solve(loaded, sys_b, f.path, SolverSettings{});
    CHECK((a.states - b.states).cwiseAbs().maxCoeff() == 0.0);
  }

  CHECK_THROWS_AS(load_model((std::filesystem::temp_directory_path() / "mor_missing").string()),
                  Error);
}

TEST_CASE("model fields survive the save/load round trip bit-exactly") {
  const RomFixture& f = fix();
  TwoStageModel two = two_stage_offline(f.U, f.rank, 2, small_graph(), EmbedMethod::Lle, 5, false);
  RomModel model;
  model.kind = RomKind::TwoStage;
  model.two_stage = two;
  TempDir tmp("fields");
  save_model(model, tmp.dir.string());
  RomModel loaded = load_model(tmp.dir.string());
  const TwoStageModel& got = loaded.two_stage;
  CHECK((got.psi_bar - two.psi_bar).cwiseAbs().maxCoeff() == 0.0);
  CHECK((got.Y_bar - two.Y_bar).cwiseAbs().maxCoeff() == 0.0);
  CHECK((got.embedding.Y - two.embedding.Y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((got.embedding.eigenvalues - two.embedding.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  CHECK(got.embedding.method == EmbedMethod::Lle);
  CHECK(got.n_lin == 5);
  CHECK_FALSE(got.orthonormalise);
  CHECK(got.graph.method == two.graph.method);
  CHECK(got.graph.k == two.graph.k);
}
