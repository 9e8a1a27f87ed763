#include "mor.h"

#include <Eigen/Core>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "mor/config.hpp"
#include "mor/errors.hpp"
#include "mor/harness.hpp"
#include "mor/manifold.hpp"
#include "mor/matrix_io.hpp"
#include "mor/mesh.hpp"
#include "mor/model_io.hpp"
#include "mor/rng.hpp"
#include "mor/rom.hpp"

struct mor_config {
  mor::Config value;
};

namespace {

thread_local std::string g_error_name;
thread_local std::string g_error_message;

mor_status map_code(mor::ErrorCode code) {
  switch (code) {
    case mor::ErrorCode::BadArgument: return MOR_ERR_ARGUMENT;
    case mor::ErrorCode::Io: return MOR_ERR_IO;
    case mor::ErrorCode::BadConfig: return MOR_ERR_CONFIG;
    default: return MOR_ERR_DOMAIN;
  }
}

template <typename Fn>
mor_status guarded(Fn&& fn) {
  try {
    fn();
    return MOR_OK;
  } catch (const mor::Error& e) {
    g_error_name = mor::error_code_name(e.code());
    g_error_message = e.detail();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_error_name = "Internal";
    g_error_message = e.what();
    return MOR_ERR_INTERNAL;
  } catch (...) {
    g_error_name = "Internal";
    g_error_message = "unknown error";
    return MOR_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void require_arg(bool ok, const char* what) {
  mor::require(ok, mor::ErrorCode::BadArgument, what);
}

// mesh + pairing + system construction shared by the commands
struct Problem {
  mor::Mesh mesh;
  mor::PeriodicPairing pairing;
  mor::MaterialParams material;
  mor::QuadRule rule;

  explicit Problem(const mor::Config& config)
      : mesh(mor::generate_cube_mesh(config.mesh.edge_length, config.mesh.divisions)),
        material(mor::from_youngs(config.material.E, config.material.nu)),
        rule(mor::QuadRule::by_points(config.solver.quadrature_points)) {
    if (!config.mesh.pore_centers.empty())
      mesh = mor::carve_pores(mesh,
                              mor::PoreSpec{config.mesh.pore_centers, config.mesh.pore_radius});
    pairing = mor::build_periodic_pairing(mesh);
  }
};

std::vector<mor::LoadPath> config_paths(const mor::Config& config, int count) {
  mor::RngStream rng(config.paths.seed, "paths");
  return mor::generate_load_paths(count, rng, config.paths.dH_lp, config.paths.dH_ls,
                                  config.paths.steps);
}

std::vector<mor::LoadPath> paths_or_generate(const mor::Config& config, const char* paths_json,
                                             int count) {
  if (paths_json) return mor::paths_from_json_text(mor::read_text_file(paths_json));
  return config_paths(config, count);
}

}  // namespace

extern "C" {

const char* mor_last_error_name(void) { return g_error_name.c_str(); }
const char* mor_last_error_message(void) { return g_error_message.c_str(); }

void mor_string_free(char* text) { std::free(text); }

void mor_set_threads(int threads) {
  if (threads >= 1) Eigen::setNbThreads(threads);
}

mor_status mor_config_default(mor_config** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out is null");
    *out = new mor_config{mor::Config{}};
  });
}

mor_status mor_config_load(const char* path, mor_config** out) {
  return guarded([&] {
    require_arg(path != nullptr && out != nullptr, "path/out is null");
    *out = new mor_config{mor::load_config_file(path)};
  });
}

mor_status mor_config_parse(const char* json_text, mor_config** out) {
  return guarded([&] {
    require_arg(json_text != nullptr && out != nullptr, "json_text/out is null");
    *out = new mor_config{mor::config_from_json_text(json_text)};
  });
}

mor_status mor_config_set(mor_config* config, const char* assignment) {
  return guarded([&] {
    require_arg(config != nullptr && assignment != nullptr, "config/assignment is null");
    mor::apply_override(config->value, assignment);
  });
}

mor_status mor_config_dump(const mor_config* config, char** json_out) {
  return guarded([&] {
    require_arg(config != nullptr && json_out != nullptr, "config/json_out is null");
    *json_out = copy_string(mor::config_to_json_text(config->value));
    require_arg(*json_out != nullptr, "out of memory");
  });
}

void mor_config_free(mor_config* config) { delete config; }

mor_status mor_cmd_mesh(const mor_config* config, const char* out_json) {
  return guarded([&] {
    require_arg(config != nullptr && out_json != nullptr, "config/out_json is null");
    Problem problem(config->value);
    mor::write_text_file(out_json, mor::mesh_to_json(problem.mesh, problem.pairing));
  });
}

mor_status mor_cmd_paths(const mor_config* config, const char* out_json) {
  return guarded([&] {
    require_arg(config != nullptr && out_json != nullptr, "config/out_json is null");
    const auto& p = config->value.paths;
    mor::write_text_file(out_json,
                         mor::paths_to_json_text(config_paths(config->value, p.n_train + p.n_val)));
  });
}

mor_status mor_cmd_solve(const mor_config* config, const char* paths_json,
                         const char* out_snapshots) {
  return guarded([&] {
    require_arg(config != nullptr && out_snapshots != nullptr, "config/out_snapshots is null");
    Problem problem(config->value);
    mor::FemSystem system(problem.mesh, problem.pairing, problem.material, problem.rule);
    auto paths = paths_or_generate(config->value, paths_json, config->value.paths.n_train);
    mor::SnapshotSet set =
        mor::collect_snapshots(paths, system, config->value.solver.settings());
    mor::write_matrix(out_snapshots, set.U);
  });
}

mor_status mor_cmd_train(const mor_config* config, size_t method_index,
                         const char* snapshots_path, const char* out_model_dir) {
  return guarded([&] {
    require_arg(config != nullptr && snapshots_path != nullptr && out_model_dir != nullptr,
                "config/snapshots_path/out_model_dir is null");
    require_arg(method_index < config->value.methods.size(), "method index out of range");
    Eigen::MatrixXd U = mor::read_matrix(snapshots_path);
    mor::RomModel model = mor::train_model(U, config->value.methods[method_index],
                                           config->value.paths.seed);
    mor::save_model(model, out_model_dir);
  });
}

mor_status mor_cmd_rom_solve(const mor_config* config, const char* model_dir,
                             const char* paths_json, const char* out_states,
                             const char* out_trace_csv) {
  return guarded([&] {
    require_arg(config != nullptr && model_dir != nullptr && out_states != nullptr,
                "config/model_dir/out_states is null");
    mor::RomModel model = mor::load_model(model_dir);
    Problem problem(config->value);
    mor::FemSystem system(problem.mesh, problem.pairing, problem.material, problem.rule);
    const auto& pc = config->value.paths;
    auto paths = paths_or_generate(config->value, paths_json, pc.n_train + pc.n_val);
    const mor::SolverSettings settings = config->value.solver.settings();

    std::vector<mor::StepTrace> trace;
    Eigen::MatrixXd states;
    Eigen::Index col = 0;
    for (const auto& path : paths) {
      mor::RomSolveResult result = mor::rom_solve(model, system, path.H_steps, settings, path.id);
      if (states.size() == 0)
        states.resize(system.dim(),
                      static_cast<Eigen::Index>(paths.size()) * result.states.cols());
      states.middleCols(col, result.states.cols()) = result.states;
      col += result.states.cols();
      trace.insert(trace.end(), result.trace.begin(), result.trace.end());
    }
    mor::write_matrix(out_states, states.leftCols(col));
    if (out_trace_csv) mor::write_text_file(out_trace_csv, mor::trace_csv(trace));
  });
}

mor_status mor_cmd_corrdim(const char* snapshots_path, int grid_points, const char* out_csv) {
  return guarded([&] {
    require_arg(snapshots_path != nullptr && out_csv != nullptr,
                "snapshots_path/out_csv is null");
    Eigen::MatrixXd U = mor::read_matrix(snapshots_path);
    mor::write_text_file(out_csv, mor::corrdim_csv(mor::correlation_dimension(U, grid_points)));
  });
}

mor_status mor_cmd_campaign(const mor_config* config, const char* out_dir) {
  return guarded([&] {
    require_arg(config != nullptr && out_dir != nullptr, "config/out_dir is null");
    mor::run_campaign(config->value, out_dir);
  });
}

mor_status mor_cmd_report(const char* report_csv_path, char** text_out) {
  return guarded([&] {
    require_arg(report_csv_path != nullptr && text_out != nullptr,
                "report_csv_path/text_out is null");
    const std::string csv = mor::read_text_file(report_csv_path);

    // split into cells and align columns
    std::vector<std::vector<std::string>> rows;
    std::string line;
    for (size_t at = 0; at <= csv.size(); ++at) {
      if (at == csv.size() || csv[at] == '\n') {
        if (!line.empty()) {
          std::vector<std::string> cells;
          std::string cell;
          for (char ch : line)
            if (ch == ',') {
              cells.push_back(cell);
              cell.clear();
            } else {
              cell += ch;
            }
          cells.push_back(cell);
          rows.push_back(std::move(cells));
        }
        line.clear();
      } else {
        line += csv[at];
      }
    }
    mor::require(!rows.empty(), mor::ErrorCode::Io, "empty report");

    std::vector<size_t> width;
    for (const auto& row : rows)
      for (size_t c = 0; c < row.size(); ++c) {
        if (width.size() <= c) width.resize(c + 1, 0);
        width[c] = std::max(width[c], row[c].size());
      }
    std::string out;
    for (const auto& row : rows) {
      for (size_t c = 0; c < row.size(); ++c) {
        out += row[c];
        if (c + 1 < row.size()) out.append(width[c] - row[c].size() + 2, ' ');
      }
      out += '\n';
    }
    *text_out = copy_string(out);
    require_arg(*text_out != nullptr, "out of memory");
  });
}

}  // extern "C"
