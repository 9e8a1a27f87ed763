#include "mor/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "mor/errors.hpp"
#include "mor/log.hpp"
#include "mor/matrix_io.hpp"
#include "mor/pod.hpp"

namespace mor {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json matrix3_to_json(const Eigen::Matrix3d& M) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({M(i, 0), M(i, 1), M(i, 2)});
  return rows;
}

Eigen::Matrix3d matrix3_from_json(const json& j) {
  require(j.is_array() && j.size() == 3, ErrorCode::Io, "expected a 3x3 matrix");
  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i) {
    require(j[i].is_array() && j[i].size() == 3, ErrorCode::Io, "expected a 3x3 matrix");
    for (int k = 0; k < 3; ++k) M(i, k) = j[i][k].get<double>();
  }
  return M;
}

}  // namespace

std::vector<LoadPath> generate_load_paths(int count, RngStream& rng, double dH_lp, double dH_ls,
                                          int steps) {
  require(count >= 1, ErrorCode::BadArgument, "count must be >= 1");
  require(steps >= 1, ErrorCode::BadArgument, "steps must be >= 1");
  require(dH_lp >= 0.0 && dH_ls >= 0.0, ErrorCode::BadArgument, "step sizes must be >= 0");
  std::vector<LoadPath> paths;
  paths.reserve(static_cast<size_t>(count));
  for (int p = 0; p < count; ++p) {
    LoadPath path;
    path.id = p;
    path.N_lp = rng.normal_matrix3();
    require(path.N_lp.norm() > 0.0, ErrorCode::BadArgument, "degenerate direction draw");
    path.N_lp /= path.N_lp.norm();
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    for (int n = 0; n < steps; ++n) {
      Eigen::Matrix3d N_ls = rng.normal_matrix3();
      require(N_ls.norm() > 0.0, ErrorCode::BadArgument, "degenerate direction draw");
      N_ls /= N_ls.norm();
      H += dH_lp * path.N_lp + dH_ls * N_ls;
      path.N_ls.push_back(N_ls);
      path.H_steps.push_back(H);
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

std::string paths_to_json_text(const std::vector<LoadPath>& paths) {
  json out = json::array();
  for (const auto& p : paths) {
    json steps = json::array(), perturbations = json::array();
    for (const auto& H : p.H_steps) steps.push_back(matrix3_to_json(H));
    for (const auto& N : p.N_ls) perturbations.push_back(matrix3_to_json(N));
    out.push_back({{"id", p.id},
                   {"N_lp", matrix3_to_json(p.N_lp)},
                   {"N_ls", perturbations},
                   {"H_steps", steps}});
  }
  return json{{"paths", out}}.dump(1);
}

std::vector<LoadPath> paths_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorCode::Io, std::string("load paths are not valid JSON: ") + e.what());
  }
  std::vector<LoadPath> paths;
  try {
    for (const auto& jp : j.at("paths")) {
      LoadPath p;
      p.id = jp.at("id").get<int>();
      p.N_lp = matrix3_from_json(jp.at("N_lp"));
      for (const auto& jn : jp.at("N_ls")) p.N_ls.push_back(matrix3_from_json(jn));
      for (const auto& jh : jp.at("H_steps")) p.H_steps.push_back(matrix3_from_json(jh));
      require(p.N_ls.size() == p.H_steps.size(), ErrorCode::Io, "inconsistent path step counts");
      paths.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::Io, std::string("malformed load paths: ") + e.what());
  }
  return paths;
}

SnapshotSet collect_snapshots(const std::vector<LoadPath>& paths, FemSystem& system,
                              const SolverSettings& settings) {
  require(!paths.empty(), ErrorCode::BadArgument, "no load paths");
  int s = 1;
  for (const auto& p : paths) s += static_cast<int>(p.H_steps.size());
  SnapshotSet set;
  set.U.setZero(system.dim(), s);
  set.meta.assign(static_cast<size_t>(s), SnapshotMeta{});
  int col = 1;
  for (const auto& path : paths) {
    FullSolveResult result = newton_solve_reduced(system, path.H_steps, settings, path.id);
    for (int n = 0; n < result.states.cols(); ++n, ++col) {
      set.U.col(col) = result.states.col(n);
      set.meta[static_cast<size_t>(col)] = {path.id, n, path.H_steps[static_cast<size_t>(n)]};
    }
  }
  return set;
}

std::pair<double, double> error_metrics(const Eigen::MatrixXd& rom_states,
                                        const Eigen::MatrixXd& ref_states) {
  require(rom_states.rows() == ref_states.rows() && rom_states.cols() == ref_states.cols(),
          ErrorCode::BadArgument, "state shapes differ");
  require(rom_states.cols() >= 1, ErrorCode::BadArgument, "no states");
  double sum = 0.0, worst = 0.0;
  for (Eigen::Index i = 0; i < ref_states.cols(); ++i) {
    const double ref_norm = ref_states.col(i).norm();
    if (ref_norm < 1e-14)
      raise(ErrorCode::ZeroReference, "reference column " + std::to_string(i) + " is zero");
    const double err = (rom_states.col(i) - ref_states.col(i)).norm() / ref_norm;
    sum += err;
    worst = std::max(worst, err);
  }
  return {100.0 * sum / static_cast<double>(ref_states.cols()), 100.0 * worst};
}

std::string eigenvalue_decay_csv(const Eigen::MatrixXd& U) {
  Eigen::VectorXd eigenvalues, cum;
  eigenvalue_decay(U, eigenvalues, cum);
  std::string out = "d,eigenvalue,cum_fraction\n";
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    out += std::to_string(i + 1) + "," + fmt(eigenvalues[i]) + "," + fmt(cum[i]) + "\n";
  return out;
}

std::string corrdim_csv(const CorrDimEstimate& est) {
  std::string out = "eps,p_cd,delta_sd\n";
  for (Eigen::Index i = 0; i < est.eps_grid.size(); ++i)
    out += fmt(est.eps_grid[i]) + "," + fmt(est.p_cd[i]) + "," + fmt(est.delta_sd[i]) + "\n";
  return out;
}

RomModel train_model(const Eigen::MatrixXd& U, const MethodConfig& method, std::uint64_t seed) {
  const int s = static_cast<int>(U.cols());
  const DimSpec dim = method.ratio > 0.0 ? DimSpec::info_ratio(method.ratio)
                                         : DimSpec::fixed(method.d);
  RomModel model;
  if (method.name == "pod") {
    model.kind = RomKind::Pod;
    model.pod = snapshot_pod(U, dim);
    return model;
  }
  if (method.name == "lpod") {
    model.kind = RomKind::Lpod;
    LpodParams params;
    params.k = method.clusters;
    params.min_core = method.min_core;
    params.bounds = {method.enlarge_r, method.min_size, method.max_size};
    RngStream rng(seed, "kmeans");
    model.lpod = lpod_offline(U, params, dim, rng);
    return model;
  }

  const bool two_stage = method.name == "two-stage-lem" || method.name == "two-stage-lle";
  const bool single = method.name == "lem" || method.name == "lle";
  require(two_stage || single, ErrorCode::BadConfig, "unknown method '" + method.name + "'");
  const EmbedMethod embed = (method.name == "lle" || method.name == "two-stage-lle")
                                ? EmbedMethod::Lle
                                : EmbedMethod::Lem;
  GraphParams graph;
  graph.method = graph_method_from_name(method.graph);
  graph.k = method.k;
  graph.eps = method.eps;
  graph.t = method.t > 0.0 ? method.t : std::numeric_limits<double>::infinity();

  int d_bar = method.d_bar;
  if (two_stage) {
    Eigen::VectorXd eigenvalues, cum;
    eigenvalue_decay(U, eigenvalues, cum);
    d_bar = std::min(d_bar, numerical_rank(eigenvalues));
    require(d_bar > method.d, ErrorCode::BadConfig,
            "two-stage d_bar (" + std::to_string(d_bar) + ") must exceed d (" +
                std::to_string(method.d) + ")");
  }

  // grow the neighbourhood until the graph is connected
  for (;;) {
    try {
      if (two_stage) {
        model.kind = RomKind::TwoStage;
        model.two_stage = two_stage_offline(U, d_bar, method.d, graph, embed, method.n_lin,
                                            method.orthonormalise);
      } else {
        model.kind = RomKind::ManifoldLocal;
        model.manl = manl_offline(U, method.d, graph, embed, method.n_lin,
                                  method.orthonormalise);
      }
      return model;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DisconnectedGraph) throw;
      if (graph.method == GraphMethod::EpsBall) {
        graph.eps *= 2.0;
        MOR_WARN("disconnected graph, retrying with eps=" << graph.eps);
      } else {
        const int grown = std::min(2 * graph.k, s - 1);
        if (grown == graph.k) throw;
        graph.k = grown;
        MOR_WARN("disconnected graph, retrying with k=" << graph.k);
      }
    }
  }
}

std::string report_csv(const CampaignResult& result) {
  std::string out = "method,d,E_mean_pct,E_max_pct,wall_s,converged_paths\n";
  for (const auto& cell : result.cells) {
    if (!cell.error.empty()) {
      out += cell.method + "," + std::to_string(cell.d) + ",nan,nan," + fmt(cell.wall_s) + ",0\n";
      continue;
    }
    out += cell.method + "," + std::to_string(cell.d) + "," + fmt(cell.E_mean_pct) + "," +
           fmt(cell.E_max_pct) + "," + fmt(cell.wall_s) + "," +
           std::to_string(cell.converged_paths) + "\n";
  }
  return out;
}

std::string trace_csv(const std::vector<StepTrace>& trace) {
  std::string out = "path_id,step,iterations,residual,wall_ms,cluster_seq,lin_qr_ms,lin_count,zigzag\n";
  for (const auto& t : trace)
    out += std::to_string(t.path_id) + "," + std::to_string(t.step) + "," +
           std::to_string(t.iterations) + "," + fmt(t.residual) + "," + fmt(t.wall_ms) + "," +
           t.cluster_seq + "," + fmt(t.lin_qr_ms) + "," + std::to_string(t.lin_count) + "," +
           (t.zigzag ? "1" : "0") + "\n";
  return out;
}

namespace {

bool is_path_failure(ErrorCode code) {
  return code == ErrorCode::NoConvergence || code == ErrorCode::SingularNeighborhood ||
         code == ErrorCode::SolverBreakdown || code == ErrorCode::NonPositiveJacobian;
}

}  // namespace

CampaignResult run_campaign(const Config& config, const std::string& out_dir) {
  Mesh mesh = generate_cube_mesh(config.mesh.edge_length, config.mesh.divisions);
  if (!config.mesh.pore_centers.empty())
    mesh = carve_pores(mesh, PoreSpec{config.mesh.pore_centers, config.mesh.pore_radius});
  PeriodicPairing pairing = build_periodic_pairing(mesh);
  MaterialParams mat = from_youngs(config.material.E, config.material.nu);
  QuadRule rule = QuadRule::by_points(config.solver.quadrature_points);
  FemSystem system(mesh, pairing, mat, rule);
  const SolverSettings settings = config.solver.settings();
  MOR_INFO("campaign: " << mesh.elements.rows() << " elements, D=" << pairing.D);

  RngStream rng(config.paths.seed, "paths");
  const int n_paths = config.paths.n_train + config.paths.n_val;
  const int steps = config.paths.steps;
  std::vector<LoadPath> paths =
      generate_load_paths(n_paths, rng, config.paths.dH_lp, config.paths.dH_ls, steps);

  // untimed warm-up before any measured solve
  system.assemble(Eigen::VectorXd::Zero(system.dim()), Eigen::Matrix3d::Zero(), true);

  // full-order references for every path; the training split doubles as the
  // snapshot source
  const auto t_full = Clock::now();
  std::vector<Eigen::MatrixXd> refs;
  refs.reserve(static_cast<size_t>(n_paths));
  for (const auto& path : paths)
    refs.push_back(newton_solve_reduced(system, path.H_steps, settings, path.id).states);
  MOR_INFO("full-order solves: " << fmt(seconds_since(t_full)) << " s");

  const int s = 1 + config.paths.n_train * steps;
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(system.dim(), s);
  for (int p = 0; p < config.paths.n_train; ++p)
    U.middleCols(1 + p * steps, steps) = refs[static_cast<size_t>(p)];

  CampaignResult campaign;
  campaign.snapshot_count = s;
  campaign.dim = system.dim();
  eigenvalue_decay(U, campaign.eigenvalues, campaign.cum_fraction);

  Eigen::MatrixXd ref_all(system.dim(), n_paths * steps);
  for (int p = 0; p < n_paths; ++p)
    ref_all.middleCols(p * steps, steps) = refs[static_cast<size_t>(p)];

  for (const auto& method : config.methods) {
    CellReport cell;
    cell.method = method.name;
    cell.d = method.d;
    cell.total_paths = n_paths;
    cell.path_converged.assign(static_cast<size_t>(n_paths), false);
    try {
      const auto t_train = Clock::now();
      RomModel model = train_model(U, method, config.paths.seed);
      if (model.kind == RomKind::Pod) cell.d = model.pod.d;
      MOR_INFO("cell " << method.name << " d=" << cell.d
                       << ": trained in " << fmt(seconds_since(t_train)) << " s");

      Eigen::MatrixXd rom_all(system.dim(), n_paths * steps);
      const auto t_replay = Clock::now();
      for (int p = 0; p < n_paths; ++p) {
        try {
          RomSolveResult result =
              rom_solve(model, system, paths[static_cast<size_t>(p)].H_steps, settings, p);
          rom_all.middleCols(p * steps, steps) = result.states;
          cell.path_converged[static_cast<size_t>(p)] = true;
          ++cell.converged_paths;
          cell.trace.insert(cell.trace.end(), result.trace.begin(), result.trace.end());
        } catch (const Error& e) {
          if (!is_path_failure(e.code())) throw;
          MOR_WARN("cell " << method.name << " d=" << cell.d << ": path " << p << " failed: "
                           << error_code_name(e.code()) << ": " << e.detail());
        }
      }
      cell.wall_s = seconds_since(t_replay);
      if (cell.converged_paths == 0) {
        cell.error = "no path converged";
      } else {
        Eigen::MatrixXd rom_ok(system.dim(), cell.converged_paths * steps);
        Eigen::MatrixXd ref_ok(system.dim(), cell.converged_paths * steps);
        int at = 0;
        for (int p = 0; p < n_paths; ++p) {
          if (!cell.path_converged[static_cast<size_t>(p)]) continue;
          rom_ok.middleCols(at * steps, steps) = rom_all.middleCols(p * steps, steps);
          ref_ok.middleCols(at * steps, steps) = ref_all.middleCols(p * steps, steps);
          ++at;
        }
        std::tie(cell.E_mean_pct, cell.E_max_pct) = error_metrics(rom_ok, ref_ok);
        MOR_INFO("cell " << method.name << " d=" << cell.d << ": E_mean=" << fmt(cell.E_mean_pct)
                         << "% E_max=" << fmt(cell.E_max_pct) << "% wall=" << fmt(cell.wall_s)
                         << " s converged=" << cell.converged_paths << "/" << n_paths);
      }
    } catch (const Error& e) {
      cell.error = std::string(error_code_name(e.code())) + ": " + e.detail();
      MOR_WARN("cell " << method.name << " d=" << cell.d << " failed: " << cell.error);
    }
    campaign.cells.push_back(std::move(cell));
  }

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "traces");
    write_text_file((fs::path(out_dir) / "report.csv").string(), report_csv(campaign));
    std::string decay = "d,eigenvalue,cum_fraction\n";
    for (Eigen::Index i = 0; i < campaign.eigenvalues.size(); ++i)
      decay += std::to_string(i + 1) + "," + fmt(campaign.eigenvalues[i]) + "," +
               fmt(campaign.cum_fraction[i]) + "\n";
    write_text_file((fs::path(out_dir) / "eigen_decay.csv").string(), decay);
    for (size_t i = 0; i < campaign.cells.size(); ++i) {
      const auto& cell = campaign.cells[i];
      const std::string name = std::to_string(i) + "_" + cell.method + "_d" +
                               std::to_string(cell.d) + ".csv";
      write_text_file((fs::path(out_dir) / "traces" / name).string(), trace_csv(cell.trace));
    }
  }
  return campaign;
}

}  // namespace mor
