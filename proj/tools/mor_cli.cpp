#include <CLI11.hpp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "mor.h"

namespace {

struct ConfigDeleter {
  void operator()(mor_config* c) const { mor_config_free(c); }
};
using ConfigPtr = std::unique_ptr<mor_config, ConfigDeleter>;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  int threads = 0;
};

void add_config_opts(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "configuration JSON file")->required();
  cmd->add_option("--set", opts.overrides, "dot-path config override key=value");
  cmd->add_option("--threads", opts.threads, "cap internal linear-algebra threads");
}

int report_error() {
  std::fprintf(stderr, "ERROR %s: %s\n", mor_last_error_name(), mor_last_error_message());
  return 1;
}

// missing/unreadable config is a usage error (exit 2); everything else is a
// domain error (exit 1)
int load_config(const CommonOpts& opts, ConfigPtr& config) {
  mor_config* raw = nullptr;
  const mor_status status = mor_config_load(opts.config_path.c_str(), &raw);
  if (status == MOR_ERR_IO) {
    std::fprintf(stderr, "ERROR %s: %s\n", mor_last_error_name(), mor_last_error_message());
    return 2;
  }
  if (status != MOR_OK) return report_error();
  config.reset(raw);
  if (opts.threads > 0) mor_set_threads(opts.threads);
  for (const auto& assignment : opts.overrides)
    if (mor_config_set(config.get(), assignment.c_str()) != MOR_OK) return report_error();
  return 0;
}

int run_status(mor_status status) { return status == MOR_OK ? 0 : report_error(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projection-based model order reduction for hyperelastic RVE problems"};
  app.require_subcommand(1);

  CommonOpts mesh_opts;
  std::string mesh_out;
  CLI::App* cmd_mesh = app.add_subcommand("mesh", "generate the carved, paired RVE mesh");
  add_config_opts(cmd_mesh, mesh_opts);
  cmd_mesh->add_option("--out", mesh_out, "output mesh JSON")->required();

  CommonOpts paths_opts;
  std::string paths_out;
  CLI::App* cmd_paths = app.add_subcommand("paths", "generate random load paths");
  add_config_opts(cmd_paths, paths_opts);
  cmd_paths->add_option("--out", paths_out, "output load-path JSON")->required();

  CommonOpts solve_opts;
  std::string solve_out, solve_paths;
  CLI::App* cmd_solve = app.add_subcommand("solve", "run the full-order solver, collect snapshots");
  add_config_opts(cmd_solve, solve_opts);
  cmd_solve->add_option("--out", solve_out, "output snapshot matrix (.mor)")->required();
  cmd_solve->add_option("--paths", solve_paths, "load-path JSON (default: training paths from config)");

  CommonOpts train_opts;
  std::string train_snapshots, train_out;
  std::size_t train_method = 0;
  CLI::App* cmd_train = app.add_subcommand("train", "fit a reduced model to snapshots");
  add_config_opts(cmd_train, train_opts);
  cmd_train->add_option("--snapshots", train_snapshots, "snapshot matrix (.mor)")->required();
  cmd_train->add_option("--out", train_out, "output model directory")->required();
  cmd_train->add_option("--method", train_method, "index into config methods (default 0)");

  CommonOpts rom_opts;
  std::string rom_model, rom_out, rom_paths, rom_trace;
  CLI::App* cmd_rom = app.add_subcommand("rom-solve", "replay load paths through a trained model");
  add_config_opts(cmd_rom, rom_opts);
  cmd_rom->add_option("--model", rom_model, "model directory from train")->required();
  cmd_rom->add_option("--out", rom_out, "output state matrix (.mor)")->required();
  cmd_rom->add_option("--paths", rom_paths, "load-path JSON (default: all campaign paths)");
  cmd_rom->add_option("--trace", rom_trace, "optional per-step trace CSV");

  std::string corr_snapshots, corr_out;
  int corr_grid = 100;
  CLI::App* cmd_corr = app.add_subcommand("corrdim", "correlation-dimension estimate of snapshots");
  cmd_corr->add_option("--snapshots", corr_snapshots, "snapshot matrix (.mor)")->required();
  cmd_corr->add_option("--out", corr_out, "output CSV")->required();
  cmd_corr->add_option("--grid", corr_grid, "scale grid intervals (default 100)");

  CommonOpts campaign_opts;
  std::string campaign_out;
  CLI::App* cmd_campaign = app.add_subcommand("campaign", "full train/evaluate campaign");
  add_config_opts(cmd_campaign, campaign_opts);
  cmd_campaign->add_option("--out", campaign_out, "output directory")->required();

  std::string report_in;
  CLI::App* cmd_report = app.add_subcommand("report", "pretty-print a campaign report.csv");
  cmd_report->add_option("--in", report_in, "campaign report.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  ConfigPtr config;
  if (cmd_mesh->parsed()) {
    if (int rc = load_config(mesh_opts, config)) return rc;
    return run_status(mor_cmd_mesh(config.get(), mesh_out.c_str()));
  }
  if (cmd_paths->parsed()) {
    if (int rc = load_config(paths_opts, config)) return rc;
    return run_status(mor_cmd_paths(config.get(), paths_out.c_str()));
  }
  if (cmd_solve->parsed()) {
    if (int rc = load_config(solve_opts, config)) return rc;
    return run_status(mor_cmd_solve(config.get(),
                                    solve_paths.empty() ? nullptr : solve_paths.c_str(),
                                    solve_out.c_str()));
  }
  if (cmd_train->parsed()) {
    if (int rc = load_config(train_opts, config)) return rc;
    return run_status(mor_cmd_train(config.get(), train_method, train_snapshots.c_str(),
                                    train_out.c_str()));
  }
  if (cmd_rom->parsed()) {
    if (int rc = load_config(rom_opts, config)) return rc;
    return run_status(mor_cmd_rom_solve(config.get(), rom_model.c_str(),
                                        rom_paths.empty() ? nullptr : rom_paths.c_str(),
                                        rom_out.c_str(),
                                        rom_trace.empty() ? nullptr : rom_trace.c_str()));
  }
  if (cmd_corr->parsed())
    return run_status(mor_cmd_corrdim(corr_snapshots.c_str(), corr_grid, corr_out.c_str()));
  if (cmd_campaign->parsed()) {
    if (int rc = load_config(campaign_opts, config)) return rc;
    return run_status(mor_cmd_campaign(config.get(), campaign_out.c_str()));
  }
  if (cmd_report->parsed()) {
    char* text = nullptr;
    const mor_status status = mor_cmd_report(report_in.c_str(), &text);
    if (status != MOR_OK) return report_error();
    std::fputs(text, stdout);
    mor_string_free(text);
    return 0;
  }
  return 2;
}
