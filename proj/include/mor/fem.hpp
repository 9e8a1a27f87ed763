#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "mor/mesh.hpp"

namespace mor {

struct MaterialParams {
  double mu = 0.0;     // N/mm^2
  double kappa = 0.0;  // N/mm^2
};

MaterialParams from_youngs(double E, double nu);

// Compressible neo-Hooke, stress-free at F = I:
//   W = mu/2 (I_c - 3) - mu ln J + kappa/4 (J^2 - 1 - 2 ln J).
// A is d(vec P)/d(vec F) with column-major 3x3 vectorisation, 9x9.
struct StressState {
  Eigen::Matrix3d F;
  Eigen::Matrix3d P;
  Eigen::Matrix<double, 9, 9> A;
  double W = 0.0;
  double J = 0.0;
};

StressState neo_hooke(const Eigen::Matrix3d& F, const MaterialParams& mat);

struct QuadRule {
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;  // (xi,eta,zeta)
  Eigen::VectorXd weights;                          // include the 1/6 reference volume
  static QuadRule tet_degree2();                    // 4 points
  static QuadRule tet_degree3();                    // 5 points
  static QuadRule by_points(int n);                 // n in {4,5}
};

void tet10_shape(const Eigen::Vector3d& xi, Eigen::Matrix<double, 10, 1>& N,
                 Eigen::Matrix<double, 10, 3>& dN);

// Total F = I + H_bar + grad(u~); el_u is node-major (ux,uy,uz per node).
void element_stiffness_residual(const Eigen::Matrix<double, 10, 3>& el_nodes,
                                const Eigen::Matrix<double, 30, 1>& el_u,
                                const Eigen::Matrix3d& H_bar, const MaterialParams& mat,
                                const QuadRule& rule, Eigen::Matrix<double, 30, 30>* K_e,
                                Eigen::Matrix<double, 30, 1>* f_e, double* energy = nullptr,
                                Eigen::Matrix3d* P_integral = nullptr);

struct SolverSettings {
  double res_max = 1e-6;   // N, infinity norm of the (reduced) residual
  int max_iterations = 25;
  int quadrature_points = 4;
};

// Contract-level assembly over all dofs, then periodic condensation.
void assemble_full(const Mesh& mesh, const Eigen::VectorXd& u_full, const Eigen::Matrix3d& H_bar,
                   const MaterialParams& mat, const QuadRule& rule,
                   Eigen::SparseMatrix<double>& K_full, Eigen::VectorXd& r_full);
void apply_periodic(const Eigen::SparseMatrix<double>& K_full, const Eigen::VectorXd& r_full,
                    const PeriodicPairing& pairing, Eigen::SparseMatrix<double>& K_bc,
                    Eigen::VectorXd& g_bc);

// Fused assembly path: prebuilt sparsity pattern and scatter tables for one
// mesh + pairing. assemble() fills K() and g() in reduced coordinates;
// identical (to roundoff) to assemble_full + apply_periodic.
class FemSystem {
 public:
  FemSystem(const Mesh& mesh, const PeriodicPairing& pairing, const MaterialParams& mat,
            const QuadRule& rule);

  const Mesh& mesh() const { return *mesh_; }
  const PeriodicPairing& pairing() const { return *pairing_; }
  const MaterialParams& material() const { return mat_; }
  int dim() const { return pairing_->D; }

  void assemble(const Eigen::VectorXd& u_indep, const Eigen::Matrix3d& H_bar,
                bool with_matrix = true);
  const Eigen::SparseMatrix<double>& K() const { return K_bc_; }
  const Eigen::VectorXd& g() const { return g_bc_; }

  double total_energy(const Eigen::VectorXd& u_indep, const Eigen::Matrix3d& H_bar) const;
  double solid_volume() const;
  // volume-average first Piola-Kirchhoff stress over the full cube volume
  Eigen::Matrix3d volume_average_stress(const Eigen::VectorXd& u_indep,
                                        const Eigen::Matrix3d& H_bar) const;

 private:
  const Mesh* mesh_;
  const PeriodicPairing* pairing_;
  MaterialParams mat_;
  QuadRule rule_;
  std::vector<int> elem_rdof_;   // n_el*30 reduced dof ids (-1 pinned)
  std::vector<int> elem_node_;   // n_el*10 master-resolved node ids for gathering
  std::vector<int> scatter_;     // n_el*900 value slots into K_bc_ (-1 dropped)
  Eigen::SparseMatrix<double> K_bc_;
  Eigen::VectorXd g_bc_;
};

struct StepTrace {
  int path_id = 0;
  int step = 0;
  int iterations = 0;
  double residual = 0.0;
  double wall_ms = 0.0;
  std::string cluster_seq;  // LPOD only
  double lin_qr_ms = 0.0;   // manifold ROMs: linearise+QR time in this step
  int lin_count = 0;
  bool zigzag = false;
};

struct FullSolveResult {
  Eigen::MatrixXd states;  // D x steps, independent dofs
  std::vector<StepTrace> trace;
};

FullSolveResult newton_solve_reduced(FemSystem& system, const std::vector<Eigen::Matrix3d>& path,
                                     const SolverSettings& settings, int path_id = 0);

// Contract-level wrapper returning full fluctuation vectors per load step.
std::vector<Eigen::VectorXd> newton_solve(const Mesh& mesh, const PeriodicPairing& pairing,
                                          const MaterialParams& mat,
                                          const std::vector<Eigen::Matrix3d>& H_bar_path,
                                          const SolverSettings& settings);

}  // namespace mor
