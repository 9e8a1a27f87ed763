#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mor/fem.hpp"

namespace mor {

struct MeshConfig {
  double edge_length = 6.0;
  int divisions = 6;
  std::vector<Eigen::Vector3d> pore_centers = {{2.0, 2.0, 2.0}, {4.0, 4.0, 4.0}};
  double pore_radius = 1.5;
};

struct MaterialConfig {
  double E = 1000.0;
  double nu = 0.2;
};

struct PathsConfig {
  int n_train = 10;
  int n_val = 10;
  int steps = 10;
  double dH_lp = 0.03;
  double dH_ls = 0.015;
  std::uint64_t seed = 42;
};

struct SolverConfig {
  double res_max = 1e-6;
  int max_iterations = 25;
  int quadrature_points = 4;

  SolverSettings settings() const { return {res_max, max_iterations, quadrature_points}; }
};

// One campaign cell. name selects the method:
//   pod | lpod | lem | lle | two-stage-lem | two-stage-lle
// Unused fields for a given method are ignored.
struct MethodConfig {
  std::string name = "pod";
  int d = 15;
  double ratio = -1.0; // if in (0,1], picks d by information ratio (pod/lpod)
  // neighbourhood graph (manifold methods); t <= 0 means binary weights
  std::string graph = "symmetric-knn";
  int k = 30;
  double eps = 0.0;
  double t = 0.0;
  int n_lin = 20;
  bool orthonormalise = true;
  int d_bar = 60; // two-stage intermediate dimension, capped at s-1 when training
  // clustering (lpod)
  int clusters = 6;
  int min_core = 7;
  double enlarge_r = 1.0;
  int min_size = 30;
  int max_size = 50;
};

struct Config {
  MeshConfig mesh;
  MaterialConfig material;
  PathsConfig paths;
  SolverConfig solver;
  std::vector<MethodConfig> methods = {MethodConfig{}};
};

std::string config_to_json_text(const Config& config);
Config config_from_json_text(const std::string& text);
Config load_config_file(const std::string& path);

// Applies a dot-path assignment such as "paths.seed=7" or "methods.0.d=20".
void apply_override(Config& config, const std::string& assignment);

}  // namespace mor
