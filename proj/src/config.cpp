#include "mor/config.hpp"

#include <json.hpp>

#include "mor/errors.hpp"
#include "mor/matrix_io.hpp"

namespace mor {

namespace {

using nlohmann::json;

json to_json(const Config& c) {
  json pores = json::array();
  for (const auto& p : c.mesh.pore_centers) pores.push_back({p.x(), p.y(), p.z()});
  json methods = json::array();
  for (const auto& m : c.methods)
    methods.push_back({{"name", m.name},
                       {"d", m.d},
                       {"ratio", m.ratio},
                       {"graph", m.graph},
                       {"k", m.k},
                       {"eps", m.eps},
                       {"t", m.t},
                       {"n_lin", m.n_lin},
                       {"orthonormalise", m.orthonormalise},
                       {"d_bar", m.d_bar},
                       {"clusters", m.clusters},
                       {"min_core", m.min_core},
                       {"enlarge_r", m.enlarge_r},
                       {"min_size", m.min_size},
                       {"max_size", m.max_size}});
  return {{"mesh",
           {{"edge_length", c.mesh.edge_length},
            {"divisions", c.mesh.divisions},
            {"pore_centers", pores},
            {"pore_radius", c.mesh.pore_radius}}},
          {"material", {{"E", c.material.E}, {"nu", c.material.nu}}},
          {"paths",
           {{"n_train", c.paths.n_train},
            {"n_val", c.paths.n_val},
            {"steps", c.paths.steps},
            {"dH_lp", c.paths.dH_lp},
            {"dH_ls", c.paths.dH_ls},
            {"seed", c.paths.seed}}},
          {"solver",
           {{"res_max", c.solver.res_max},
            {"max_iterations", c.solver.max_iterations},
            {"quadrature_points", c.solver.quadrature_points}}},
          {"methods", methods}};
}

template <typename T>
void read_into(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Config from_json(const json& j) {
  Config c;
  try {
    if (j.contains("mesh")) {
      const json& m = j.at("mesh");
      read_into(m, "edge_length", c.mesh.edge_length);
      read_into(m, "divisions", c.mesh.divisions);
      read_into(m, "pore_radius", c.mesh.pore_radius);
      if (m.contains("pore_centers")) {
        c.mesh.pore_centers.clear();
        for (const auto& p : m.at("pore_centers")) {
          require(p.is_array() && p.size() == 3, ErrorCode::BadConfig,
                  "pore center must be a 3-vector");
          c.mesh.pore_centers.emplace_back(p[0].get<double>(), p[1].get<double>(),
                                           p[2].get<double>());
        }
      }
    }
    if (j.contains("material")) {
      const json& m = j.at("material");
      read_into(m, "E", c.material.E);
      read_into(m, "nu", c.material.nu);
    }
    if (j.contains("paths")) {
      const json& p = j.at("paths");
      read_into(p, "n_train", c.paths.n_train);
      read_into(p, "n_val", c.paths.n_val);
      read_into(p, "steps", c.paths.steps);
      read_into(p, "dH_lp", c.paths.dH_lp);
      read_into(p, "dH_ls", c.paths.dH_ls);
      read_into(p, "seed", c.paths.seed);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      read_into(s, "res_max", c.solver.res_max);
      read_into(s, "max_iterations", c.solver.max_iterations);
      read_into(s, "quadrature_points", c.solver.quadrature_points);
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& jm : j.at("methods")) {
        MethodConfig m;
        read_into(jm, "name", m.name);
        read_into(jm, "d", m.d);
        read_into(jm, "ratio", m.ratio);
        read_into(jm, "graph", m.graph);
        read_into(jm, "k", m.k);
        read_into(jm, "eps", m.eps);
        read_into(jm, "t", m.t);
        read_into(jm, "n_lin", m.n_lin);
        read_into(jm, "orthonormalise", m.orthonormalise);
        read_into(jm, "d_bar", m.d_bar);
        read_into(jm, "clusters", m.clusters);
        read_into(jm, "min_core", m.min_core);
        read_into(jm, "enlarge_r", m.enlarge_r);
        read_into(jm, "min_size", m.min_size);
        read_into(jm, "max_size", m.max_size);
        c.methods.push_back(std::move(m));
      }
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::BadConfig, std::string("malformed config: ") + e.what());
  }
  return c;
}

}  // namespace

std::string config_to_json_text(const Config& config) { return to_json(config).dump(1); }

Config config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorCode::BadConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

Config load_config_file(const std::string& path) {
  return config_from_json_text(read_text_file(path));
}

void apply_override(Config& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0, ErrorCode::BadConfig,
          "override must have the form key.path=value");
  std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  for (auto& ch : key)
    if (ch == '.') ch = '/';

  json j = to_json(config);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value; // bare strings stay strings
  }
  try {
    json::json_pointer ptr("/" + key);
    require(j.contains(ptr), ErrorCode::BadConfig, "unknown config key '" + assignment.substr(0, eq) + "'");
    // keep the original type: a string default accepts unquoted values
    if (j.at(ptr).is_string() && !parsed.is_string()) parsed = value;
    j[ptr] = parsed;
  } catch (const json::exception& e) {
    raise(ErrorCode::BadConfig, std::string("bad override path: ") + e.what());
  }
  config = from_json(j);
}

}  // namespace mor
