#include "mor/model_io.hpp"

#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <limits>

#include "mor/errors.hpp"
#include "mor/matrix_io.hpp"

namespace mor {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string kind_name(RomKind kind) {
  switch (kind) {
    case RomKind::Pod: return "pod";
    case RomKind::Lpod: return "lpod";
    case RomKind::ManifoldLocal: return "manifold";
    case RomKind::TwoStage: return "two-stage";
  }
  return "unknown";
}

RomKind kind_from_name(const std::string& name) {
  if (name == "pod") return RomKind::Pod;
  if (name == "lpod") return RomKind::Lpod;
  if (name == "manifold") return RomKind::ManifoldLocal;
  if (name == "two-stage") return RomKind::TwoStage;
  raise(ErrorCode::Io, "unknown model kind '" + name + "'");
}

json graph_to_json(const GraphParams& graph) {
  return {{"method", graph_method_name(graph.method)},
          {"k", graph.k},
          {"eps", graph.eps},
          {"t", std::isinf(graph.t) ? 0.0 : graph.t}};
}

GraphParams graph_from_json(const json& j) {
  GraphParams graph;
  graph.method = graph_method_from_name(j.at("method").get<std::string>());
  graph.k = j.at("k").get<int>();
  graph.eps = j.at("eps").get<double>();
  const double t = j.at("t").get<double>();
  graph.t = t > 0.0 ? t : std::numeric_limits<double>::infinity();
  return graph;
}

void write_vector(const fs::path& path, const Eigen::VectorXd& v) {
  write_matrix(path.string(), v);
}

Eigen::VectorXd read_vector(const fs::path& path) {
  Eigen::MatrixXd m = read_matrix(path.string());
  require(m.cols() == 1, ErrorCode::Io, path.string() + " is not a column vector");
  return m.col(0);
}

void save_pod_basis(const PodBasis& basis, const fs::path& dir, const std::string& tag) {
  write_matrix((dir / (tag + "psi.mor")).string(), basis.psi);
  write_vector(dir / (tag + "eigenvalues.mor"), basis.eigenvalues);
  write_vector(dir / (tag + "cum_fraction.mor"), basis.cum_fraction);
}

PodBasis load_pod_basis(const fs::path& dir, const std::string& tag) {
  PodBasis basis;
  basis.psi = read_matrix((dir / (tag + "psi.mor")).string());
  basis.eigenvalues = read_vector(dir / (tag + "eigenvalues.mor"));
  basis.cum_fraction = read_vector(dir / (tag + "cum_fraction.mor"));
  basis.d = static_cast<int>(basis.psi.cols());
  return basis;
}

void save_embedding(const Embedding& emb, const fs::path& dir) {
  write_matrix((dir / "Y.mor").string(), emb.Y);
  write_vector(dir / "embedding_eigenvalues.mor", emb.eigenvalues);
}

Embedding load_embedding(const fs::path& dir, EmbedMethod method) {
  Embedding emb;
  emb.Y = read_matrix((dir / "Y.mor").string());
  emb.eigenvalues = read_vector(dir / "embedding_eigenvalues.mor");
  emb.d = static_cast<int>(emb.Y.rows());
  emb.method = method;
  return emb;
}

}  // namespace

void save_model(const RomModel& model, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path base(dir);
  json manifest = {{"kind", kind_name(model.kind)}};
  switch (model.kind) {
    case RomKind::Pod:
      manifest["d"] = model.pod.d;
      save_pod_basis(model.pod, base, "");
      break;
    case RomKind::Lpod: {
      manifest["clusters"] = model.lpod.clusters;
      manifest["core_clusters"] = model.lpod.core_clusters;
      write_matrix((base / "centroids.mor").string(), model.lpod.centroids);
      for (size_t j = 0; j < model.lpod.bases.size(); ++j)
        save_pod_basis(model.lpod.bases[j], base, "cluster" + std::to_string(j) + "_");
      manifest["basis_count"] = model.lpod.bases.size();
      break;
    }
    case RomKind::ManifoldLocal:
      manifest["embed"] = embed_method_name(model.manl.embedding.method);
      manifest["graph"] = graph_to_json(model.manl.graph);
      manifest["n_lin"] = model.manl.n_lin;
      manifest["orthonormalise"] = model.manl.orthonormalise;
      write_matrix((base / "U_ambient.mor").string(), model.manl.U_ambient);
      save_embedding(model.manl.embedding, base);
      break;
    case RomKind::TwoStage:
      manifest["embed"] = embed_method_name(model.two_stage.embedding.method);
      manifest["graph"] = graph_to_json(model.two_stage.graph);
      manifest["n_lin"] = model.two_stage.n_lin;
      manifest["orthonormalise"] = model.two_stage.orthonormalise;
      write_matrix((base / "psi_bar.mor").string(), model.two_stage.psi_bar);
      write_matrix((base / "Y_bar.mor").string(), model.two_stage.Y_bar);
      save_embedding(model.two_stage.embedding, base);
      break;
  }
  write_text_file((base / "manifest.json").string(), manifest.dump(1));
}

RomModel load_model(const std::string& dir) {
  const fs::path base(dir);
  json manifest;
  try {
    manifest = json::parse(read_text_file((base / "manifest.json").string()));
  } catch (const json::exception& e) {
    raise(ErrorCode::Io, std::string("malformed model manifest: ") + e.what());
  }
  RomModel model;
  try {
    model.kind = kind_from_name(manifest.at("kind").get<std::string>());
    switch (model.kind) {
      case RomKind::Pod:
        model.pod = load_pod_basis(base, "");
        break;
      case RomKind::Lpod: {
        model.lpod.clusters = manifest.at("clusters").get<std::vector<std::vector<int>>>();
        model.lpod.core_clusters =
            manifest.at("core_clusters").get<std::vector<std::vector<int>>>();
        model.lpod.centroids = read_matrix((base / "centroids.mor").string());
        const size_t count = manifest.at("basis_count").get<size_t>();
        for (size_t j = 0; j < count; ++j)
          model.lpod.bases.push_back(load_pod_basis(base, "cluster" + std::to_string(j) + "_"));
        break;
      }
      case RomKind::ManifoldLocal: {
        const EmbedMethod embed = embed_method_from_name(manifest.at("embed").get<std::string>());
        model.manl.graph = graph_from_json(manifest.at("graph"));
        model.manl.n_lin = manifest.at("n_lin").get<int>();
        model.manl.orthonormalise = manifest.at("orthonormalise").get<bool>();
        model.manl.U_ambient = read_matrix((base / "U_ambient.mor").string());
        model.manl.embedding = load_embedding(base, embed);
        break;
      }
      case RomKind::TwoStage: {
        const EmbedMethod embed = embed_method_from_name(manifest.at("embed").get<std::string>());
        model.two_stage.graph = graph_from_json(manifest.at("graph"));
        model.two_stage.n_lin = manifest.at("n_lin").get<int>();
        model.two_stage.orthonormalise = manifest.at("orthonormalise").get<bool>();
        model.two_stage.psi_bar = read_matrix((base / "psi_bar.mor").string());
        model.two_stage.Y_bar = read_matrix((base / "Y_bar.mor").string());
        model.two_stage.embedding = load_embedding(base, embed);
        break;
      }
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::Io, std::string("malformed model manifest: ") + e.what());
  }
  return model;
}

}  // namespace mor
