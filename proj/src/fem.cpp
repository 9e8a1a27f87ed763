#include "mor/fem.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mor/errors.hpp"
#include "mor/log.hpp"

namespace mor {

MaterialParams from_youngs(double E, double nu) {
  require(E > 0.0, ErrorCode::BadArgument, "Young's modulus must be positive");
  require(nu > -1.0 && nu < 0.5, ErrorCode::BadArgument,
          "Poisson ratio must lie in (-1, 0.5)");
  MaterialParams m;
  m.mu = E / (2.0 * (1.0 + nu));
  m.kappa = E / (3.0 * (1.0 - 2.0 * nu));
  return m;
}

StressState neo_hooke(const Eigen::Matrix3d& F, const MaterialParams& mat) {
  StressState s;
  s.F = F;
  s.J = F.determinant();
  if (!(s.J > 0.0))
    raise(ErrorCode::NonPositiveJacobian, "det(F) = " + std::to_string(s.J));
  const double Ic = (F.transpose() * F).trace();
  const double J2 = s.J * s.J;
  // -mu ln J keeps the reference stress-free: P(I) = 0 and W >= 0
  s.W = 0.5 * mat.mu * (Ic - 3.0) - mat.mu * std::log(s.J) +
        0.25 * mat.kappa * (J2 - 1.0 - 2.0 * std::log(s.J));
  const Eigen::Matrix3d Fit = F.inverse().transpose();
  const double c2 = 0.5 * mat.kappa * (J2 - 1.0) - mat.mu;
  s.P = mat.mu * F + c2 * Fit;
  // A_{iJkL} = mu d_ik d_JL + kappa J^2 Fit_iJ Fit_kL - c2 Fit_iL Fit_kJ
  const double c1 = mat.kappa * J2;
  s.A.setZero();
  for (int J = 0; J < 3; ++J)
    for (int i = 0; i < 3; ++i) {
      const int p = 3 * J + i;
      for (int L = 0; L < 3; ++L)
        for (int k = 0; k < 3; ++k) {
          const int q = 3 * L + k;
          double a = c1 * Fit(i, J) * Fit(k, L) - c2 * Fit(i, L) * Fit(k, J);
          if (i == k && J == L) a += mat.mu;
          s.A(p, q) = a;
        }
    }
  return s;
}

QuadRule QuadRule::tet_degree2() {
  QuadRule r;
  const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
  const double b = (5.0 - std::sqrt(5.0)) / 20.0;
  r.points.resize(4, 3);
  r.points << a, b, b, b, a, b, b, b, a, b, b, b;
  r.weights = Eigen::VectorXd::Constant(4, 1.0 / 24.0);
  return r;
}

QuadRule QuadRule::tet_degree3() {
  QuadRule r;
  r.points.resize(5, 3);
  const double s = 1.0 / 6.0;
  r.points << 0.25, 0.25, 0.25, 0.5, s, s, s, 0.5, s, s, s, 0.5, s, s, s;
  // rows 1..4 are the permutations of (1/2,1/6,1/6) for (xi,eta,zeta); the
  // fourth barycentric coordinate carries the remaining 1/2 on the last row
  r.points.row(4) << s, s, s;
  r.weights.resize(5);
  r.weights << -4.0 / 5.0 / 6.0, 9.0 / 20.0 / 6.0, 9.0 / 20.0 / 6.0, 9.0 / 20.0 / 6.0,
      9.0 / 20.0 / 6.0;
  return r;
}

QuadRule QuadRule::by_points(int n) {
  if (n == 4) return tet_degree2();
  if (n == 5) return tet_degree3();
  raise(ErrorCode::BadConfig, "quadrature must use 4 or 5 points, got " + std::to_string(n));
}

void tet10_shape(const Eigen::Vector3d& xi, Eigen::Matrix<double, 10, 1>& N,
                 Eigen::Matrix<double, 10, 3>& dN) {
  const double l1 = xi[0], l2 = xi[1], l3 = xi[2];
  const double l0 = 1.0 - l1 - l2 - l3;
  N[0] = l0 * (2.0 * l0 - 1.0);
  N[1] = l1 * (2.0 * l1 - 1.0);
  N[2] = l2 * (2.0 * l2 - 1.0);
  N[3] = l3 * (2.0 * l3 - 1.0);
  N[4] = 4.0 * l0 * l1;
  N[5] = 4.0 * l1 * l2;
  N[6] = 4.0 * l2 * l0;
  N[7] = 4.0 * l0 * l3;
  N[8] = 4.0 * l1 * l3;
  N[9] = 4.0 * l2 * l3;
  // dl0/dxi_j = -1
  const double g0 = 4.0 * l0 - 1.0;
  dN.row(0) << -g0, -g0, -g0;
  dN.row(1) << 4.0 * l1 - 1.0, 0.0, 0.0;
  dN.row(2) << 0.0, 4.0 * l2 - 1.0, 0.0;
  dN.row(3) << 0.0, 0.0, 4.0 * l3 - 1.0;
  dN.row(4) << 4.0 * (l0 - l1), -4.0 * l1, -4.0 * l1;
  dN.row(5) << 4.0 * l2, 4.0 * l1, 0.0;
  dN.row(6) << -4.0 * l2, 4.0 * (l0 - l2), -4.0 * l2;
  dN.row(7) << -4.0 * l3, -4.0 * l3, 4.0 * (l0 - l3);
  dN.row(8) << 4.0 * l3, 0.0, 4.0 * l1;
  dN.row(9) << 0.0, 4.0 * l3, 4.0 * l2;
}

void element_stiffness_residual(const Eigen::Matrix<double, 10, 3>& el_nodes,
                                const Eigen::Matrix<double, 30, 1>& el_u,
                                const Eigen::Matrix3d& H_bar, const MaterialParams& mat,
                                const QuadRule& rule, Eigen::Matrix<double, 30, 30>* K_e,
                                Eigen::Matrix<double, 30, 1>* f_e, double* energy,
                                Eigen::Matrix3d* P_integral) {
  if (K_e) K_e->setZero();
  if (f_e) f_e->setZero();
  if (energy) *energy = 0.0;
  if (P_integral) P_integral->setZero();

  Eigen::Matrix<double, 10, 1> N;
  Eigen::Matrix<double, 10, 3> dN;
  Eigen::Matrix<double, 9, 30> B;
  const Eigen::Map<const Eigen::Matrix<double, 10, 3, Eigen::RowMajor>> U(el_u.data());

  for (int q = 0; q < rule.points.rows(); ++q) {
    tet10_shape(rule.points.row(q).transpose(), N, dN);
    const Eigen::Matrix3d J0 = el_nodes.transpose() * dN;
    const double detJ = J0.determinant();
    if (!(detJ > 0.0))
      raise(ErrorCode::NonPositiveJacobian,
            "reference Jacobian " + std::to_string(detJ) + " at quadrature point " +
                std::to_string(q));
    const Eigen::Matrix<double, 10, 3> G = dN * J0.inverse();  // dN/dX
    Eigen::Matrix3d F = Eigen::Matrix3d::Identity() + H_bar;
    F += (U.transpose() * G);
    const StressState s = neo_hooke(F, mat);
    const double w = rule.weights[q] * detJ;

    if (energy) *energy += w * s.W;
    if (P_integral) *P_integral += w * s.P;

    if (f_e) {
      for (int a = 0; a < 10; ++a)
        for (int i = 0; i < 3; ++i)
          (*f_e)[3 * a + i] += w * (s.P(i, 0) * G(a, 0) + s.P(i, 1) * G(a, 1) + s.P(i, 2) * G(a, 2));
    }
    if (K_e) {
      B.setZero();
      for (int a = 0; a < 10; ++a)
        for (int i = 0; i < 3; ++i)
          for (int J = 0; J < 3; ++J) B(3 * J + i, 3 * a + i) = G(a, J);
      K_e->noalias() += w * (B.transpose() * (s.A * B));
    }
  }
}

void assemble_full(const Mesh& mesh, const Eigen::VectorXd& u_full, const Eigen::Matrix3d& H_bar,
                   const MaterialParams& mat, const QuadRule& rule,
                   Eigen::SparseMatrix<double>& K_full, Eigen::VectorXd& r_full) {
  const int n_dof = 3 * mesh.node_count();
  require(static_cast<int>(u_full.size()) == n_dof, ErrorCode::BadArgument,
          "u_full length must be 3 x node_count");
  r_full = Eigen::VectorXd::Zero(n_dof);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(mesh.element_count()) * 900);
  Eigen::Matrix<double, 10, 3> el_nodes;
  Eigen::Matrix<double, 30, 1> el_u;
  Eigen::Matrix<double, 30, 30> K_e;
  Eigen::Matrix<double, 30, 1> f_e;
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (int a = 0; a < 10; ++a) {
      const int node = mesh.elements(e, a);
      el_nodes.row(a) = mesh.nodes.row(node);
      for (int c = 0; c < 3; ++c) el_u[3 * a + c] = u_full[3 * node + c];
    }
    try {
      element_stiffness_residual(el_nodes, el_u, H_bar, mat, rule, &K_e, &f_e);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::NonPositiveJacobian)
        raise(err.code(), "element " + std::to_string(e) + ": " + err.detail());
      throw;
    }
    for (int a = 0; a < 10; ++a)
      for (int i = 0; i < 3; ++i) {
        const int row = 3 * mesh.elements(e, a) + i;
        r_full[row] += f_e[3 * a + i];
        for (int b = 0; b < 10; ++b)
          for (int k = 0; k < 3; ++k)
            triplets.emplace_back(row, 3 * mesh.elements(e, b) + k, K_e(3 * a + i, 3 * b + k));
      }
  }
  K_full.resize(n_dof, n_dof);
  K_full.setFromTriplets(triplets.begin(), triplets.end());
}

void apply_periodic(const Eigen::SparseMatrix<double>& K_full, const Eigen::VectorXd& r_full,
                    const PeriodicPairing& pairing, Eigen::SparseMatrix<double>& K_bc,
                    Eigen::VectorXd& g_bc) {
  auto reduced_of = [&](int full_dof) {
    const int node = full_dof / 3;
    const int c = full_dof % 3;
    return pairing.dof_reduced[static_cast<size_t>(
        3 * pairing.master_of_node[static_cast<size_t>(node)] + c)];
  };
  g_bc = Eigen::VectorXd::Zero(pairing.D);
  for (int i = 0; i < static_cast<int>(r_full.size()); ++i) {
    const int r = reduced_of(i);
    if (r >= 0) g_bc[r] += r_full[i];
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(K_full.nonZeros()));
  for (int col = 0; col < K_full.outerSize(); ++col) {
    const int rc = reduced_of(col);
    if (rc < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(K_full, col); it; ++it) {
      const int rr = reduced_of(static_cast<int>(it.row()));
      if (rr >= 0) triplets.emplace_back(rr, rc, it.value());
    }
  }
  K_bc.resize(pairing.D, pairing.D);
  K_bc.setFromTriplets(triplets.begin(), triplets.end());
}

FemSystem::FemSystem(const Mesh& mesh, const PeriodicPairing& pairing, const MaterialParams& mat,
                     const QuadRule& rule)
    : mesh_(&mesh), pairing_(&pairing), mat_(mat), rule_(rule) {
  const int n_el = mesh.element_count();
  elem_rdof_.resize(static_cast<size_t>(n_el) * 30);
  elem_node_.resize(static_cast<size_t>(n_el) * 10);
  for (int e = 0; e < n_el; ++e)
    for (int a = 0; a < 10; ++a) {
      const int node = mesh.elements(e, a);
      elem_node_[static_cast<size_t>(e) * 10 + static_cast<size_t>(a)] =
          pairing.master_of_node[static_cast<size_t>(node)];
      for (int c = 0; c < 3; ++c)
        elem_rdof_[static_cast<size_t>(e) * 30 + static_cast<size_t>(3 * a + c)] =
            pairing.dof_reduced[static_cast<size_t>(
                3 * pairing.master_of_node[static_cast<size_t>(node)] + c)];
    }

  // build the condensed sparsity pattern once, then precompute value slots
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(n_el) * 900);
  for (int e = 0; e < n_el; ++e)
    for (int a = 0; a < 30; ++a) {
      const int ra = elem_rdof_[static_cast<size_t>(e) * 30 + static_cast<size_t>(a)];
      if (ra < 0) continue;
      for (int b = 0; b < 30; ++b) {
        const int rb = elem_rdof_[static_cast<size_t>(e) * 30 + static_cast<size_t>(b)];
        if (rb >= 0) triplets.emplace_back(ra, rb, 0.0);
      }
    }
  K_bc_.resize(pairing.D, pairing.D);
  K_bc_.setFromTriplets(triplets.begin(), triplets.end());
  K_bc_.makeCompressed();

  scatter_.assign(static_cast<size_t>(n_el) * 900, -1);
  const int* outer = K_bc_.outerIndexPtr();
  const int* inner = K_bc_.innerIndexPtr();
  auto slot = [&](int row, int col) {
    const int lo = outer[col], hi = outer[col + 1];
    const int* it = std::lower_bound(inner + lo, inner + hi, row);
    return static_cast<int>(it - inner);
  };
  for (int e = 0; e < n_el; ++e)
    for (int a = 0; a < 30; ++a) {
      const int ra = elem_rdof_[static_cast<size_t>(e) * 30 + static_cast<size_t>(a)];
      if (ra < 0) continue;
      for (int b = 0; b < 30; ++b) {
        const int rb = elem_rdof_[static_cast<size_t>(e) * 30 + static_cast<size_t>(b)];
        if (rb < 0) continue;
        scatter_[static_cast<size_t>(e) * 900 + static_cast<size_t>(30 * a + b)] = slot(ra, rb);
      }
    }
  g_bc_.resize(pairing.D);
}

void FemSystem::assemble(const Eigen::VectorXd& u_indep, const Eigen::Matrix3d& H_bar,
                         bool with_matrix) {
  require(static_cast<int>(u_indep.size()) == pairing_->D, ErrorCode::BadArgument,
          "state length mismatch");
  double* vals = K_bc_.valuePtr();
  if (with_matrix) std::fill(vals, vals + K_bc_.nonZeros(), 0.0);
  g_bc_.setZero();

  Eigen::Matrix<double, 10, 3> el_nodes;
  Eigen::Matrix<double, 30, 1> el_u;
  Eigen::Matrix<double, 30, 30> K_e;
  Eigen::Matrix<double, 30, 1> f_e;
  const int n_el = mesh_->element_count();
  for (int e = 0; e < n_el; ++e) {
    for (int a = 0; a < 10; ++a) {
      el_nodes.row(a) = mesh_->nodes.row(mesh_->elements(e, a));
      for (int c = 0; c < 3; ++c) {
        const int r = elem_rdof_[static_cast<size_t>(e) * 30 + static_cast<size_t>(3 * a + c)];
        el_u[3 * a + c] = r >= 0 ? u_indep[r] : 0.0;
      }
    }
    try {
      element_stiffness_residual(el_nodes, el_u, H_bar, mat_, rule_, with_matrix ? &K_e : nullptr,
                                 &f_e);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::NonPositiveJacobian)
        raise(err.code(), "element " + std::to_string(e) + ": " + err.detail());
      throw;
    }
    const size_t base = static_cast<size_t>(e) * 900;
    for (int a = 0; a < 30; ++a) {
      const int ra = elem_rdof_[static_cast<size_t>(e) * 30 + static_cast<size_t>(a)];
      if (ra < 0) continue;
      g_bc_[ra] += f_e[a];
      if (with_matrix) {
        for (int b = 0; b < 30; ++b) {
          const int s = scatter_[base + static_cast<size_t>(30 * a + b)];
          if (s >= 0) vals[s] += K_e(a, b);
        }
      }
    }
  }
}

double FemSystem::total_energy(const Eigen::VectorXd& u_indep, const Eigen::Matrix3d& H_bar) const {
  Eigen::Matrix<double, 10, 3> el_nodes;
  Eigen::Matrix<double, 30, 1> el_u;
  double total = 0.0;
  for (int e = 0; e < mesh_->element_count(); ++e) {
    for (int a = 0; a < 10; ++a) {
      el_nodes.row(a) = mesh_->nodes.row(mesh_->elements(e, a));
      for (int c = 0; c < 3; ++c) {
        const int r = elem_rdof_[static_cast<size_t>(e) * 30 + static_cast<size_t>(3 * a + c)];
        el_u[3 * a + c] = r >= 0 ? u_indep[r] : 0.0;
      }
    }
    double w = 0.0;
    element_stiffness_residual(el_nodes, el_u, H_bar, mat_, rule_, nullptr, nullptr, &w);
    total += w;
  }
  return total;
}

double FemSystem::solid_volume() const {
  Eigen::Matrix<double, 10, 1> N;
  Eigen::Matrix<double, 10, 3> dN;
  Eigen::Matrix<double, 10, 3> el_nodes;
  double vol = 0.0;
  for (int e = 0; e < mesh_->element_count(); ++e) {
    for (int a = 0; a < 10; ++a) el_nodes.row(a) = mesh_->nodes.row(mesh_->elements(e, a));
    for (int q = 0; q < rule_.points.rows(); ++q) {
      tet10_shape(rule_.points.row(q).transpose(), N, dN);
      vol += rule_.weights[q] * (el_nodes.transpose() * dN).determinant();
    }
  }
  return vol;
}

Eigen::Matrix3d FemSystem::volume_average_stress(const Eigen::VectorXd& u_indep,
                                                 const Eigen::Matrix3d& H_bar) const {
  Eigen::Matrix<double, 10, 3> el_nodes;
  Eigen::Matrix<double, 30, 1> el_u;
  Eigen::Matrix3d total = Eigen::Matrix3d::Zero();
  for (int e = 0; e < mesh_->element_count(); ++e) {
    for (int a = 0; a < 10; ++a) {
      el_nodes.row(a) = mesh_->nodes.row(mesh_->elements(e, a));
      for (int c = 0; c < 3; ++c) {
        const int r = elem_rdof_[static_cast<size_t>(e) * 30 + static_cast<size_t>(3 * a + c)];
        el_u[3 * a + c] = r >= 0 ? u_indep[r] : 0.0;
      }
    }
    Eigen::Matrix3d Pint;
    element_stiffness_residual(el_nodes, el_u, H_bar, mat_, rule_, nullptr, nullptr, nullptr,
                               &Pint);
    total += Pint;
  }
  const double V0 = std::pow(mesh_->edge_length, 3);
  return total / V0;
}

FullSolveResult newton_solve_reduced(FemSystem& system, const std::vector<Eigen::Matrix3d>& path,
                                     const SolverSettings& settings, int path_id) {
  require(!path.empty(), ErrorCode::BadArgument, "empty load path");
  const int D = system.dim();
  FullSolveResult result;
  result.states.resize(D, static_cast<Eigen::Index>(path.size()));

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(D);

  for (size_t step = 0; step < path.size(); ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    StepTrace trace;
    trace.path_id = path_id;
    trace.step = static_cast<int>(step);
    double res = 1e10;
    int it = 0;
    while (true) {
      ++it;
      system.assemble(u, path[step], true);
      res = system.g().cwiseAbs().maxCoeff();
      if (!std::isfinite(res))
        raise(ErrorCode::NoConvergence, "non-finite residual at path " + std::to_string(path_id) +
                                            " step " + std::to_string(step));
      if (res < settings.res_max) break;
      if (it >= settings.max_iterations)
        raise(ErrorCode::NoConvergence,
              "path " + std::to_string(path_id) + " step " + std::to_string(step) + " iteration " +
                  std::to_string(it) + " residual " + std::to_string(res));
      if (!analyzed) {
        ldlt.analyzePattern(system.K());
        analyzed = true;
      }
      ldlt.factorize(system.K());
      if (ldlt.info() != Eigen::Success)
        raise(ErrorCode::SolverBreakdown, "LDLT factorisation failed at path " +
                                              std::to_string(path_id) + " step " +
                                              std::to_string(step));
      u += ldlt.solve(-system.g());
    }
    trace.iterations = it;
    trace.residual = res;
    trace.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.states.col(static_cast<Eigen::Index>(step)) = u;
    result.trace.push_back(std::move(trace));
  }
  return result;
}

std::vector<Eigen::VectorXd> newton_solve(const Mesh& mesh, const PeriodicPairing& pairing,
                                          const MaterialParams& mat,
                                          const std::vector<Eigen::Matrix3d>& H_bar_path,
                                          const SolverSettings& settings) {
  FemSystem system(mesh, pairing, mat, QuadRule::by_points(settings.quadrature_points));
  FullSolveResult reduced = newton_solve_reduced(system, H_bar_path, settings);
  std::vector<Eigen::VectorXd> out;
  out.reserve(H_bar_path.size());
  for (Eigen::Index s = 0; s < reduced.states.cols(); ++s)
    out.push_back(pairing.expand(reduced.states.col(s)));
  return out;
}

}  // namespace mor
