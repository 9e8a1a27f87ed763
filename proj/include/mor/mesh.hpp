#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mor {

// Quadratic tetrahedra: nodes 0-3 are corners, then edge midnodes in the
// order (0,1),(1,2),(2,0),(0,3),(1,3),(2,3).
struct Mesh {
  Eigen::MatrixXd nodes;     // n_nodes x 3, mm
  Eigen::MatrixXi elements;  // n_elements x 10
  double edge_length = 0.0;
  int divisions = 0;

  int node_count() const { return static_cast<int>(nodes.rows()); }
  int element_count() const { return static_cast<int>(elements.rows()); }
};

struct PoreSpec {
  std::vector<Eigen::Vector3d> centers;  // mm
  double radius = 0.0;                   // mm
};

// Periodic boundary pairing plus the reduced (independent) dof indexing.
// Dependent boundary nodes follow their minimum-coordinate master; the
// master corner at the origin is pinned to remove the rigid translation.
struct PeriodicPairing {
  int pinned_node = -1;
  std::vector<int> master_of_node;  // per node; masters and interior map to themselves
  std::vector<int> dof_reduced;     // 3*node+c -> reduced index, -1 for pinned dofs
  std::vector<int> independent_dofs;  // full dof ids owning a reduced slot, size D
  std::vector<int> dependent_dofs;    // full dof ids slaved to a partner
  int D = 0;

  // partner (independent) full dof of a dependent full dof
  int partner_of(int full_dof) const;
  Eigen::VectorXd expand(const Eigen::VectorXd& u_indep) const;
  Eigen::VectorXd restrict_full(const Eigen::VectorXd& u_full) const;
};

Mesh generate_cube_mesh(double edge_length, int divisions_per_axis);
Mesh carve_pores(const Mesh& mesh, const PoreSpec& pores);
PeriodicPairing build_periodic_pairing(const Mesh& mesh);

std::string mesh_to_json(const Mesh& mesh, const PeriodicPairing& pairing);
void mesh_from_json(const std::string& text, Mesh& mesh, PeriodicPairing& pairing);

}  // namespace mor
