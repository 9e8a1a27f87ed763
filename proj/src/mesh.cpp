#include "mor/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "mor/errors.hpp"
#include "mor/log.hpp"

namespace mor {

using json = nlohmann::json;

int PeriodicPairing::partner_of(int full_dof) const {
  int node = full_dof / 3;
  int c = full_dof % 3;
  return 3 * master_of_node[static_cast<size_t>(node)] + c;
}

Eigen::VectorXd PeriodicPairing::expand(const Eigen::VectorXd& u_indep) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof_reduced.size()));
  for (size_t i = 0; i < dof_reduced.size(); ++i) {
    int node = static_cast<int>(i) / 3;
    int c = static_cast<int>(i) % 3;
    int r = dof_reduced[static_cast<size_t>(3 * master_of_node[static_cast<size_t>(node)] + c)];
    full[static_cast<Eigen::Index>(i)] = r >= 0 ? u_indep[r] : 0.0;
  }
  return full;
}

Eigen::VectorXd PeriodicPairing::restrict_full(const Eigen::VectorXd& u_full) const {
  Eigen::VectorXd u(D);
  for (int i = 0; i < D; ++i) u[i] = u_full[independent_dofs[static_cast<size_t>(i)]];
  return u;
}

namespace {

// unique key for a grid vertex (i,j,k) on the (n+1)^3 lattice
inline std::int64_t corner_key(int i, int j, int k, int n) {
  return (static_cast<std::int64_t>(i) * (n + 1) + j) * (n + 1) + k;
}

}  // namespace

Mesh generate_cube_mesh(double edge_length, int divisions_per_axis) {
  require(edge_length > 0.0, ErrorCode::BadArgument, "edge_length must be positive");
  require(divisions_per_axis >= 1, ErrorCode::BadArgument, "divisions_per_axis must be >= 1");
  const int n = divisions_per_axis;
  const double h = edge_length / n;

  const int n_corners = (n + 1) * (n + 1) * (n + 1);
  std::vector<std::array<double, 3>> coords(static_cast<size_t>(n_corners));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        coords[static_cast<size_t>(corner_key(i, j, k, n))] = {i * h, j * h, k * h};

  // Kuhn subdivision: each cell splits into 6 tets along the main diagonal,
  // one per permutation of the axes. Translation-invariant, so shared faces
  // and opposite cube faces carry the same triangulation.
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto perm_sign = [](const int* p) {
    int inv = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        if (p[a] > p[b]) ++inv;
    return inv % 2 == 0 ? 1 : -1;
  };

  std::vector<std::array<int, 4>> tets;
  tets.reserve(static_cast<size_t>(6 * n * n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (const auto& p : perms) {
          int loc[3] = {0, 0, 0};
          std::array<int, 4> v;
          v[0] = static_cast<int>(corner_key(i, j, k, n));
          loc[p[0]] = 1;
          v[1] = static_cast<int>(corner_key(i + loc[0], j + loc[1], k + loc[2], n));
          loc[p[1]] = 1;
          v[2] = static_cast<int>(corner_key(i + loc[0], j + loc[1], k + loc[2], n));
          v[3] = static_cast<int>(corner_key(i + 1, j + 1, k + 1, n));
          if (perm_sign(p) < 0) std::swap(v[1], v[2]);
          tets.push_back(v);
        }

  // Tet4 -> Tet10: insert one midnode per unique edge
  static const int edges[6][2] = {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}};
  std::unordered_map<std::int64_t, int> mid_of_edge;
  mid_of_edge.reserve(tets.size() * 4);
  std::vector<std::array<double, 3>> all_coords = coords;
  Eigen::MatrixXi elements(static_cast<Eigen::Index>(tets.size()), 10);
  for (size_t e = 0; e < tets.size(); ++e) {
    for (int c = 0; c < 4; ++c) elements(static_cast<Eigen::Index>(e), c) = tets[e][static_cast<size_t>(c)];
    for (int ed = 0; ed < 6; ++ed) {
      int a = tets[e][static_cast<size_t>(edges[ed][0])];
      int b = tets[e][static_cast<size_t>(edges[ed][1])];
      if (a > b) std::swap(a, b);
      std::int64_t key = static_cast<std::int64_t>(a) * n_corners + b;
      auto it = mid_of_edge.find(key);
      int mid;
      if (it == mid_of_edge.end()) {
        mid = static_cast<int>(all_coords.size());
        const auto& ca = all_coords[static_cast<size_t>(a)];
        const auto& cb = all_coords[static_cast<size_t>(b)];
        all_coords.push_back({0.5 * (ca[0] + cb[0]), 0.5 * (ca[1] + cb[1]), 0.5 * (ca[2] + cb[2])});
        mid_of_edge.emplace(key, mid);
      } else {
        mid = it->second;
      }
      elements(static_cast<Eigen::Index>(e), 4 + ed) = mid;
    }
  }

  Mesh mesh;
  mesh.edge_length = edge_length;
  mesh.divisions = n;
  mesh.elements = std::move(elements);
  mesh.nodes.resize(static_cast<Eigen::Index>(all_coords.size()), 3);
  for (size_t i = 0; i < all_coords.size(); ++i)
    for (int c = 0; c < 3; ++c) mesh.nodes(static_cast<Eigen::Index>(i), c) = all_coords[i][static_cast<size_t>(c)];
  return mesh;
}

Mesh carve_pores(const Mesh& mesh, const PoreSpec& pores) {
  if (pores.centers.empty()) return mesh;
  require(pores.radius > 0.0, ErrorCode::BadArgument, "pore radius must be positive");
  const double L = mesh.edge_length;
  for (const auto& c : pores.centers) {
    for (int ax = 0; ax < 3; ++ax) {
      if (c[ax] - pores.radius <= 0.0 || c[ax] + pores.radius >= L)
        raise(ErrorCode::PoreTouchesBoundary,
              "pore sphere at (" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," +
                  std::to_string(c[2]) + ") r=" + std::to_string(pores.radius) +
                  " intersects the outer cube surface");
    }
  }

  std::vector<int> keep;
  for (int e = 0; e < mesh.element_count(); ++e) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int c = 0; c < 4; ++c) centroid += mesh.nodes.row(mesh.elements(e, c)).transpose();
    centroid /= 4.0;
    bool inside = false;
    for (const auto& p : pores.centers)
      if ((centroid - p).norm() < pores.radius) inside = true;
    if (!inside) keep.push_back(e);
  }
  require(!keep.empty(), ErrorCode::BadArgument, "carving removed every element");

  std::vector<int> new_id(static_cast<size_t>(mesh.node_count()), -1);
  int next = 0;
  for (int e : keep)
    for (int c = 0; c < 10; ++c) {
      int node = mesh.elements(e, c);
      if (new_id[static_cast<size_t>(node)] < 0) new_id[static_cast<size_t>(node)] = 1;
    }
  for (int node = 0; node < mesh.node_count(); ++node)
    if (new_id[static_cast<size_t>(node)] > 0) new_id[static_cast<size_t>(node)] = next++;

  Mesh out;
  out.edge_length = mesh.edge_length;
  out.divisions = mesh.divisions;
  out.nodes.resize(next, 3);
  for (int node = 0; node < mesh.node_count(); ++node)
    if (new_id[static_cast<size_t>(node)] >= 0)
      out.nodes.row(new_id[static_cast<size_t>(node)]) = mesh.nodes.row(node);
  out.elements.resize(static_cast<Eigen::Index>(keep.size()), 10);
  for (size_t i = 0; i < keep.size(); ++i)
    for (int c = 0; c < 10; ++c)
      out.elements(static_cast<Eigen::Index>(i), c) = new_id[static_cast<size_t>(mesh.elements(keep[i], c))];
  MOR_DEBUG("carved " << mesh.element_count() - out.element_count() << " of "
                      << mesh.element_count() << " elements");
  return out;
}

PeriodicPairing build_periodic_pairing(const Mesh& mesh) {
  const double L = mesh.edge_length;
  const int n = mesh.divisions;
  require(L > 0.0 && n >= 1, ErrorCode::BadArgument, "mesh lacks generator metadata");
  const double tol = 1e-9 * L;
  // all structured-mesh coordinates sit on the half-step lattice
  const double unit = 0.5 * L / n;
  const int top = 2 * n;

  auto key_of = [&](double x) {
    double q = x / unit;
    long k = std::lround(q);
    require(std::abs(x - static_cast<double>(k) * unit) < tol, ErrorCode::UnmatchedBoundaryNode,
            "node coordinate off the structured lattice: " + std::to_string(x));
    return k;
  };

  const int n_nodes = mesh.node_count();
  std::unordered_map<std::int64_t, int> node_at;
  node_at.reserve(static_cast<size_t>(n_nodes) * 2);
  std::vector<std::array<long, 3>> keys(static_cast<size_t>(n_nodes));
  auto pack = [&](long a, long b, long c) {
    return (a * (top + 1) + b) * (top + 1) + c;
  };
  for (int i = 0; i < n_nodes; ++i) {
    keys[static_cast<size_t>(i)] = {key_of(mesh.nodes(i, 0)), key_of(mesh.nodes(i, 1)),
                                    key_of(mesh.nodes(i, 2))};
    node_at[pack(keys[static_cast<size_t>(i)][0], keys[static_cast<size_t>(i)][1],
                 keys[static_cast<size_t>(i)][2])] = i;
  }

  PeriodicPairing pairing;
  pairing.master_of_node.resize(static_cast<size_t>(n_nodes));
  pairing.dof_reduced.assign(static_cast<size_t>(3 * n_nodes), -1);

  auto pinned_it = node_at.find(pack(0, 0, 0));
  require(pinned_it != node_at.end(), ErrorCode::UnmatchedBoundaryNode,
          "origin corner node missing");
  pairing.pinned_node = pinned_it->second;

  for (int i = 0; i < n_nodes; ++i) {
    const auto& k = keys[static_cast<size_t>(i)];
    bool dependent = k[0] == top || k[1] == top || k[2] == top;
    if (!dependent) {
      pairing.master_of_node[static_cast<size_t>(i)] = i;
      continue;
    }
    auto it = node_at.find(pack(k[0] == top ? 0 : k[0], k[1] == top ? 0 : k[1],
                                k[2] == top ? 0 : k[2]));
    require(it != node_at.end(), ErrorCode::UnmatchedBoundaryNode,
            "no partner for boundary node " + std::to_string(i));
    pairing.master_of_node[static_cast<size_t>(i)] = it->second;
  }

  for (int i = 0; i < n_nodes; ++i) {
    bool master = pairing.master_of_node[static_cast<size_t>(i)] == i;
    if (!master) {
      for (int c = 0; c < 3; ++c) pairing.dependent_dofs.push_back(3 * i + c);
      continue;
    }
    if (i == pairing.pinned_node) continue;
    for (int c = 0; c < 3; ++c) {
      pairing.dof_reduced[static_cast<size_t>(3 * i + c)] =
          static_cast<int>(pairing.independent_dofs.size());
      pairing.independent_dofs.push_back(3 * i + c);
    }
  }
  pairing.D = static_cast<int>(pairing.independent_dofs.size());
  return pairing;
}

std::string mesh_to_json(const Mesh& mesh, const PeriodicPairing& pairing) {
  json j;
  j["edge_length"] = mesh.edge_length;
  j["divisions"] = mesh.divisions;
  json nodes = json::array();
  for (int i = 0; i < mesh.node_count(); ++i)
    nodes.push_back({mesh.nodes(i, 0), mesh.nodes(i, 1), mesh.nodes(i, 2)});
  j["nodes"] = std::move(nodes);
  json elements = json::array();
  for (int e = 0; e < mesh.element_count(); ++e) {
    json el = json::array();
    for (int c = 0; c < 10; ++c) el.push_back(mesh.elements(e, c));
    elements.push_back(std::move(el));
  }
  j["elements"] = std::move(elements);

  json pj;
  pj["pinned_node"] = pairing.pinned_node;
  pj["independent_dofs"] = pairing.independent_dofs;
  pj["dependent_dofs"] = pairing.dependent_dofs;
  json partner = json::object();
  for (int dof : pairing.dependent_dofs)
    partner[std::to_string(dof)] = pairing.partner_of(dof);
  pj["partner_of"] = std::move(partner);
  j["pairing"] = std::move(pj);
  return j.dump(1);
}

void mesh_from_json(const std::string& text, Mesh& mesh, PeriodicPairing& pairing) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    raise(ErrorCode::Io, std::string("bad mesh JSON: ") + e.what());
  }
  mesh.edge_length = j.at("edge_length").get<double>();
  mesh.divisions = j.at("divisions").get<int>();
  const auto& nodes = j.at("nodes");
  mesh.nodes.resize(static_cast<Eigen::Index>(nodes.size()), 3);
  for (size_t i = 0; i < nodes.size(); ++i)
    for (int c = 0; c < 3; ++c)
      mesh.nodes(static_cast<Eigen::Index>(i), c) = nodes[i][static_cast<size_t>(c)].get<double>();
  const auto& elements = j.at("elements");
  mesh.elements.resize(static_cast<Eigen::Index>(elements.size()), 10);
  for (size_t e = 0; e < elements.size(); ++e)
    for (int c = 0; c < 10; ++c)
      mesh.elements(static_cast<Eigen::Index>(e), c) = elements[e][static_cast<size_t>(c)].get<int>();
  pairing = build_periodic_pairing(mesh);
}

}  // namespace mor
