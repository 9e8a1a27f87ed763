#ifndef MOR_H
#define MOR_H

/* C interface to the model-order-reduction library.  All functions return
 * MOR_OK on success; on failure the thread-local last-error state carries a
 * stable code name and a human-readable message. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mor_status {
  MOR_OK = 0,
  MOR_ERR_ARGUMENT = 1, /* bad call arguments */
  MOR_ERR_IO = 2,       /* file or serialisation problems */
  MOR_ERR_CONFIG = 3,   /* malformed configuration */
  MOR_ERR_DOMAIN = 4,   /* numerical failures: convergence, rank, clustering, ... */
  MOR_ERR_INTERNAL = 5
} mor_status;

/* Machine-readable code name (e.g. "NoConvergence") and message for the last
 * failure on the calling thread.  Valid until the next failing call. */
const char* mor_last_error_name(void);
const char* mor_last_error_message(void);

/* Frees strings returned through char** out parameters. */
void mor_string_free(char* text);

typedef struct mor_config mor_config;

mor_status mor_config_default(mor_config** out);
mor_status mor_config_load(const char* path, mor_config** out);
mor_status mor_config_parse(const char* json_text, mor_config** out);
/* Applies a dot-path override such as "paths.seed=7" or "methods.0.d=20". */
mor_status mor_config_set(mor_config* config, const char* assignment);
mor_status mor_config_dump(const mor_config* config, char** json_out);
void mor_config_free(mor_config* config);

/* Caps internal linear-algebra parallelism. */
void mor_set_threads(int threads);

/* Pipeline commands.  Paths are filesystem locations; optional inputs may be
 * NULL to fall back to config-seeded generation. */

/* Writes the carved, paired mesh as JSON. */
mor_status mor_cmd_mesh(const mor_config* config, const char* out_json);

/* Writes all campaign load paths (training + validation) as JSON. */
mor_status mor_cmd_paths(const mor_config* config, const char* out_json);

/* Runs the full-order solver over the training paths (or the paths in
 * paths_json if given) and writes the snapshot matrix. */
mor_status mor_cmd_solve(const mor_config* config, const char* paths_json,
                         const char* out_snapshots);

/* Trains config->methods[method_index] on a snapshot matrix and writes the
 * model directory. */
mor_status mor_cmd_train(const mor_config* config, size_t method_index,
                         const char* snapshots_path, const char* out_model_dir);

/* Replays all campaign load paths (or the paths in paths_json if given)
 * through a trained model; writes converged states and, if out_trace_csv is
 * non-NULL, the per-step solve trace. */
mor_status mor_cmd_rom_solve(const mor_config* config, const char* model_dir,
                             const char* paths_json, const char* out_states,
                             const char* out_trace_csv);

/* Correlation-dimension estimate of a snapshot matrix, written as CSV. */
mor_status mor_cmd_corrdim(const char* snapshots_path, int grid_points, const char* out_csv);

/* Full train/evaluate campaign; writes report.csv, eigen_decay.csv and
 * traces/ under out_dir. */
mor_status mor_cmd_campaign(const mor_config* config, const char* out_dir);

/* Renders a campaign report.csv as an aligned text table. */
mor_status mor_cmd_report(const char* report_csv_path, char** text_out);

#ifdef __cplusplus
}
#endif

#endif /* MOR_H */
