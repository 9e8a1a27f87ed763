#include "mor/rom.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <string>

#include "mor/errors.hpp"
#include "mor/log.hpp"

namespace mor {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string step_context(int path_id, int step, int iter, double res) {
  return "path " + std::to_string(path_id) + ", step " + std::to_string(step) + ", iteration " +
         std::to_string(iter) + ", residual " + std::to_string(res);
}

void check_residual(double res, int path_id, int step, int iter, int max_iterations) {
  if (!std::isfinite(res))
    raise(ErrorCode::NoConvergence,
          "residual is not finite (" + step_context(path_id, step, iter, res) + ")");
  if (iter >= max_iterations)
    raise(ErrorCode::NoConvergence,
          "max iterations reached (" + step_context(path_id, step, iter, res) + ")");
}

Eigen::VectorXd solve_reduced(const Eigen::MatrixXd& K_r, const Eigen::VectorXd& g_r) {
  Eigen::VectorXd dy = Eigen::PartialPivLU<Eigen::MatrixXd>(K_r).solve(-g_r);
  if (!dy.allFinite())
    raise(ErrorCode::SolverBreakdown, "reduced system solve produced non-finite values");
  return dy;
}

// local_linearise with one retry at doubled neighborhood size
LocalTangent fit_tangent(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y,
                         const Eigen::MatrixXd& ambient, int n_lin) {
  const int s = static_cast<int>(Y.cols());
  try {
    return local_linearise(y, Y, ambient, n_lin);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularNeighborhood) throw;
    const int n_retry = std::min(2 * n_lin, s);
    if (n_retry <= n_lin) throw;
    MOR_WARN("singular neighborhood at n=" << n_lin << ", retrying with n=" << n_retry);
    return local_linearise(y, Y, ambient, n_retry);
  }
}

// a run of >= 4 transitions alternating between two clusters within one step
bool detect_zigzag(const std::vector<int>& seq) {
  int run = 1, max_run = 1;
  for (size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] != seq[i - 1] && (i < 2 || seq[i] == seq[i - 2]))
      ++run;
    else
      run = seq[i] != seq[i - 1] ? 2 : 1;
    max_run = std::max(max_run, run);
  }
  return max_run - 1 >= 4;
}

std::string join_seq(const std::vector<int>& seq) {
  std::string out;
  for (size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(seq[i]);
  }
  return out;
}

}  // namespace

ManlModel manl_offline(const Eigen::MatrixXd& U, int d, const GraphParams& graph,
                       EmbedMethod method, int n_lin, bool orthonormalise) {
  ManlModel model;
  model.U_ambient = U;
  model.graph = graph;
  model.n_lin = n_lin;
  model.orthonormalise = orthonormalise;
  NeighborGraph g = build_graph(U, graph);
  model.embedding = method == EmbedMethod::Lem
                        ? lem_embed(g, d)
                        : lle_embed(lle_weights(U, g, 0.001), d);
  return model;
}

TwoStageModel two_stage_offline(const Eigen::MatrixXd& U, int d_bar, int d,
                                const GraphParams& graph, EmbedMethod method, int n_lin,
                                bool orthonormalise) {
  require(d >= 1 && d < d_bar, ErrorCode::BadArgument, "need 1 <= d < d_bar");
  TwoStageModel model;
  PodBasis stage1 = snapshot_pod(U, DimSpec::fixed(d_bar));
  model.psi_bar = stage1.psi;
  model.Y_bar = stage1.psi.transpose() * U;
  model.graph = graph;
  model.n_lin = n_lin;
  model.orthonormalise = orthonormalise;
  NeighborGraph g = build_graph(model.Y_bar, graph);
  model.embedding = method == EmbedMethod::Lem
                        ? lem_embed(g, d)
                        : lle_embed(lle_weights(model.Y_bar, g, 0.001), d);
  return model;
}

RomSolveResult rom_solve_pod(const PodBasis& model, FemSystem& system,
                             const std::vector<Eigen::Matrix3d>& path,
                             const SolverSettings& settings, int path_id) {
  require(!path.empty(), ErrorCode::BadArgument, "empty load path");
  const int steps = static_cast<int>(path.size());
  const Eigen::MatrixXd& psi = model.psi;
  RomSolveResult result;
  result.states.resize(system.dim(), steps);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(system.dim());

  for (int step = 0; step < steps; ++step) {
    const auto t0 = Clock::now();
    StepTrace trace;
    trace.path_id = path_id;
    trace.step = step;
    double res = 0.0;
    int iter = 0;
    for (;;) {
      ++iter;
      system.assemble(u, path[static_cast<size_t>(step)], true);
      Eigen::VectorXd g_r = psi.transpose() * system.g();
      res = g_r.cwiseAbs().maxCoeff();
      if (std::isfinite(res) && res < settings.res_max) break;
      check_residual(res, path_id, step, iter, settings.max_iterations);
      Eigen::MatrixXd K_r = psi.transpose() * (system.K() * psi);
      u += psi * solve_reduced(K_r, g_r);
    }
    trace.iterations = iter;
    trace.residual = res;
    trace.wall_ms = ms_since(t0);
    result.states.col(step) = u;
    result.trace.push_back(std::move(trace));
  }
  return result;
}

RomSolveResult rom_solve_lpod(const LpodModel& model, FemSystem& system,
                              const std::vector<Eigen::Matrix3d>& path,
                              const SolverSettings& settings, int path_id) {
  require(!path.empty(), ErrorCode::BadArgument, "empty load path");
  const int steps = static_cast<int>(path.size());
  const int k = static_cast<int>(model.bases.size());
  RomSolveResult result;
  result.states.resize(system.dim(), steps);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(system.dim());

  for (int step = 0; step < steps; ++step) {
    const auto t0 = Clock::now();
    StepTrace trace;
    trace.path_id = path_id;
    trace.step = step;
    std::vector<int> seq;
    double res = 0.0;
    int iter = 0;
    for (;;) {
      ++iter;
      // nearest centroid in solution space, ties to the lowest cluster id
      int cluster = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        const double dist = (u - model.centroids.col(j)).squaredNorm();
        if (dist < best) {
          best = dist;
          cluster = j;
        }
      }
      seq.push_back(cluster);
      const Eigen::MatrixXd& psi = model.bases[static_cast<size_t>(cluster)].psi;
      system.assemble(u, path[static_cast<size_t>(step)], true);
      Eigen::VectorXd g_r = psi.transpose() * system.g();
      res = g_r.cwiseAbs().maxCoeff();
      if (std::isfinite(res) && res < settings.res_max) break;
      check_residual(res, path_id, step, iter, settings.max_iterations);
      Eigen::MatrixXd K_r = psi.transpose() * (system.K() * psi);
      u += psi * solve_reduced(K_r, g_r);
    }
    trace.iterations = iter;
    trace.residual = res;
    trace.wall_ms = ms_since(t0);
    trace.cluster_seq = join_seq(seq);
    trace.zigzag = detect_zigzag(seq);
    if (trace.zigzag)
      MOR_WARN("cluster zig-zag on path " << path_id << ", step " << step << ": "
                                          << trace.cluster_seq);
    result.states.col(step) = u;
    result.trace.push_back(std::move(trace));
  }
  return result;
}

namespace {

// shared online loop for the single- and two-stage manifold ROMs; stage-1
// basis is the identity in the single-stage case (pass nullptr)
RomSolveResult solve_manifold(const Eigen::MatrixXd& ambient, const Embedding& embedding,
                              int n_lin, bool orthonormalise, const Eigen::MatrixXd* psi_bar,
                              FemSystem& system, const std::vector<Eigen::Matrix3d>& path,
                              const SolverSettings& settings, int path_id) {
  require(!path.empty(), ErrorCode::BadArgument, "empty load path");
  const int steps = static_cast<int>(path.size());
  const Eigen::MatrixXd& Y = embedding.Y;
  RomSolveResult result;
  result.states.resize(system.dim(), steps);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(system.dim());
  Eigen::VectorXd y = Y.col(0); // zero snapshot embeds at column 0

  for (int step = 0; step < steps; ++step) {
    const auto t0 = Clock::now();
    StepTrace trace;
    trace.path_id = path_id;
    trace.step = step;
    double res = 0.0;
    int iter = 0;
    for (;;) {
      ++iter;
      const auto t_lin = Clock::now();
      LocalTangent tangent;
      try {
        tangent = fit_tangent(y, Y, ambient, n_lin);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularNeighborhood) throw;
        raise(e.code(), e.detail() + " (" + step_context(path_id, step, iter, res) + ")");
      }
      trace.lin_qr_ms += ms_since(t_lin);
      ++trace.lin_count;
      const Eigen::MatrixXd& P = orthonormalise ? tangent.phi_perp : tangent.phi;

      system.assemble(u, path[static_cast<size_t>(step)], true);
      // convergence is measured on the orthonormalised tangent either way so
      // the stopping point does not depend on the R_perp scaling
      Eigen::VectorXd g_r(P.cols());
      Eigen::MatrixXd K_r;
      if (psi_bar) {
        Eigen::VectorXd g_bar = psi_bar->transpose() * system.g();
        g_r = P.transpose() * g_bar;
        res = orthonormalise ? g_r.cwiseAbs().maxCoeff()
                             : (tangent.phi_perp.transpose() * g_bar).cwiseAbs().maxCoeff();
      } else {
        g_r = P.transpose() * system.g();
        res = orthonormalise ? g_r.cwiseAbs().maxCoeff()
                             : (tangent.phi_perp.transpose() * system.g()).cwiseAbs().maxCoeff();
      }
      MOR_DEBUG("manl path " << path_id << " step " << step << " iter " << iter << " res "
                             << std::scientific << std::setprecision(10) << res << " nb "
                             << join_seq(tangent.neighbor_ids));
      if (std::isfinite(res) && res < settings.res_max) break;
      check_residual(res, path_id, step, iter, settings.max_iterations);
      if (psi_bar) {
        Eigen::MatrixXd K_bar = psi_bar->transpose() * (system.K() * *psi_bar);
        K_r = P.transpose() * K_bar * P;
      } else {
        K_r = P.transpose() * (system.K() * P);
      }
      Eigen::VectorXd dy = solve_reduced(K_r, g_r);
      if (psi_bar)
        u += *psi_bar * (P * dy);
      else
        u += P * dy;
      if (orthonormalise)
        y += tangent.R_perp.triangularView<Eigen::Upper>().solve(dy);
      else
        y += dy;
    }
    trace.iterations = iter;
    trace.residual = res;
    trace.wall_ms = ms_since(t0);
    result.states.col(step) = u;
    result.trace.push_back(std::move(trace));
  }
  return result;
}

}  // namespace

RomSolveResult rom_solve_manl(const ManlModel& model, FemSystem& system,
                              const std::vector<Eigen::Matrix3d>& path,
                              const SolverSettings& settings, int path_id) {
  require(model.U_ambient.rows() == system.dim(), ErrorCode::BadArgument,
          "model ambient dimension does not match the system");
  return solve_manifold(model.U_ambient, model.embedding, model.n_lin, model.orthonormalise,
                        nullptr, system, path, settings, path_id);
}

RomSolveResult rom_solve_two_stage(const TwoStageModel& model, FemSystem& system,
                                   const std::vector<Eigen::Matrix3d>& path,
                                   const SolverSettings& settings, int path_id) {
  require(model.psi_bar.rows() == system.dim(), ErrorCode::BadArgument,
          "stage-1 basis does not match the system");
  return solve_manifold(model.Y_bar, model.embedding, model.n_lin, model.orthonormalise,
                        &model.psi_bar, system, path, settings, path_id);
}

RomSolveResult rom_solve(const RomModel& model, FemSystem& system,
                         const std::vector<Eigen::Matrix3d>& path, const SolverSettings& settings,
                         int path_id) {
  switch (model.kind) {
    case RomKind::Pod: return rom_solve_pod(model.pod, system, path, settings, path_id);
    case RomKind::Lpod: return rom_solve_lpod(model.lpod, system, path, settings, path_id);
    case RomKind::ManifoldLocal:
      return rom_solve_manl(model.manl, system, path, settings, path_id);
    case RomKind::TwoStage:
      return rom_solve_two_stage(model.two_stage, system, path, settings, path_id);
  }
  raise(ErrorCode::BadArgument, "unknown model kind");
}

}  // namespace mor
