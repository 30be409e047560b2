#include "topt/fea.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <string>

#include "topt/errors.hpp"

namespace topt {

namespace {

// Local node coordinates, counterclockwise from the lower-left corner.
constexpr double kXiNode[4] = {-1.0, 1.0, 1.0, -1.0};
constexpr double kEtaNode[4] = {-1.0, -1.0, 1.0, 1.0};

}  // namespace

ElementMatrix element_stiffness_q4(double poisson, double element_size) {
  if (!(poisson > 0.0 && poisson < 0.5))
    throw ParameterError("element_stiffness_q4: poisson must lie in (0, 0.5)");
  if (!(element_size > 0.0))
    throw ParameterError("element_stiffness_q4: element_size must be > 0");

  const double nu = poisson;
  // Plane stress, E = 1, unit thickness.
  const double d11 = 1.0 / (1.0 - nu * nu);
  const double d12 = nu * d11;
  const double d33 = 0.5 * (1.0 - nu) * d11;

  ElementMatrix ke{};
  const double gp = 1.0 / std::sqrt(3.0);
  const double h = element_size;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double xi = (a == 0 ? -gp : gp);
      const double eta = (b == 0 ? -gp : gp);
      // dN/dx for a square element: J = (h/2) I, detJ = h^2/4.
      double dndx[4], dndy[4];
      for (int n = 0; n < 4; ++n) {
        dndx[n] = 0.25 * kXiNode[n] * (1.0 + eta * kEtaNode[n]) * (2.0 / h);
        dndy[n] = 0.25 * kEtaNode[n] * (1.0 + xi * kXiNode[n]) * (2.0 / h);
      }
      const double w = h * h / 4.0;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          // B_i^T D B_j blocks for (ux_i, uy_i) x (ux_j, uy_j)
          ke[2 * i][2 * j] += w * (d11 * dndx[i] * dndx[j] + d33 * dndy[i] * dndy[j]);
          ke[2 * i][2 * j + 1] += w * (d12 * dndx[i] * dndy[j] + d33 * dndy[i] * dndx[j]);
          ke[2 * i + 1][2 * j] += w * (d12 * dndy[i] * dndx[j] + d33 * dndx[i] * dndy[j]);
          ke[2 * i + 1][2 * j + 1] += w * (d11 * dndy[i] * dndy[j] + d33 * dndx[i] * dndx[j]);
        }
      }
    }
  }
  return ke;
}

LinearSystem assemble_and_solve(const StructuredGrid& grid,
                                const BoundaryConditions& bc,
                                std::span<const double> element_moduli,
                                double poisson,
                                const SolveOptions& options) {
  bc.validate(grid);
  const std::size_t n_elem = grid.num_elements();
  if (element_moduli.size() != n_elem)
    throw DomainError("assemble_and_solve: element_moduli size mismatch");

  const std::size_t n_dof = grid.num_dofs();
  std::vector<int> dof_map(n_dof, -1);  // global dof -> free index
  {
    std::vector<char> fixed(n_dof, 0);
    for (int d : bc.fixed_dofs) fixed[d] = 1;
    int next = 0;
    for (std::size_t d = 0; d < n_dof; ++d)
      if (!fixed[d]) dof_map[d] = next++;
  }

  LinearSystem sys;
  for (std::size_t d = 0; d < n_dof; ++d)
    if (dof_map[d] >= 0) sys.free_dofs.push_back(static_cast<int>(d));
  const int n_free = static_cast<int>(sys.free_dofs.size());

  const ElementMatrix ke = element_stiffness_q4(poisson, grid.element_size);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n_elem * 64);
  for (std::size_t e = 0; e < n_elem; ++e) {
    const auto dofs = grid.element_dofs(static_cast<int>(e));
    const double mod = element_moduli[e];
    for (int i = 0; i < 8; ++i) {
      const int gi = dof_map[dofs[i]];
      if (gi < 0) continue;
      for (int j = 0; j < 8; ++j) {
        const int gj = dof_map[dofs[j]];
        if (gj < 0) continue;
        triplets.emplace_back(gi, gj, mod * ke[i][j]);
      }
    }
  }
  sys.stiffness.resize(n_free, n_free);
  sys.stiffness.setFromTriplets(triplets.begin(), triplets.end());

  sys.rhs = Eigen::VectorXd::Zero(n_free);
  for (const auto& [dof, val] : bc.loads) {
    const int fi = dof_map[dof];
    if (fi >= 0) sys.rhs[fi] += val;
  }

  Eigen::VectorXd u_free(n_free);
  const double rhs_norm = sys.rhs.norm();
  if (rhs_norm == 0.0) {
    u_free.setZero();
    sys.iterations = 0;
    sys.residual = 0.0;
  } else if (n_free < options.dense_threshold && !options.force_iterative) {
    Eigen::MatrixXd dense(sys.stiffness);
    u_free = Eigen::LDLT<Eigen::MatrixXd>(dense).solve(sys.rhs);
    sys.iterations = 0;
    sys.residual = (sys.stiffness * u_free - sys.rhs).norm() / rhs_norm;
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(options.rel_tolerance);
    cg.setMaxIterations(10 * static_cast<Eigen::Index>(n_free));
    cg.compute(sys.stiffness);
    u_free = cg.solve(sys.rhs);
    sys.iterations = static_cast<int>(cg.iterations());
    sys.residual = (sys.stiffness * u_free - sys.rhs).norm() / rhs_norm;
    if (cg.info() != Eigen::Success && sys.residual > options.rel_tolerance)
      throw SingularSystemError(
          "assemble_and_solve: cg stalled at relative residual " +
          std::to_string(sys.residual) +
          " (system may be near-singular; check density floor e_min)");
  }

  sys.solution.assign(n_dof, 0.0);
  for (std::size_t d = 0; d < n_dof; ++d)
    if (dof_map[d] >= 0) sys.solution[d] = u_free[dof_map[d]];
  return sys;
}

ComplianceResult compliance_and_gradient(const StructuredGrid& grid,
                                         const BoundaryConditions& bc,
                                         std::span<const double> densities,
                                         const MaterialModel& model,
                                         const SolveOptions& options) {
  const std::size_t n_elem = grid.num_elements();
  const std::size_t k = model.num_materials();
  const StiffnessInterpolation interp =
      interpolate_stiffness(densities, n_elem, model);
  const LinearSystem sys =
      assemble_and_solve(grid, bc, interp.moduli, model.poisson, options);

  ComplianceResult out;
  out.solver_iterations = sys.iterations;
  for (const auto& [dof, val] : bc.loads) out.compliance += val * sys.solution[dof];

  const ElementMatrix ke = element_stiffness_q4(model.poisson, grid.element_size);
  std::vector<double> energy(n_elem);  // u_e^T k0 u_e per element
  for (std::size_t e = 0; e < n_elem; ++e) {
    const auto dofs = grid.element_dofs(static_cast<int>(e));
    double ue[8];
    for (int i = 0; i < 8; ++i) ue[i] = sys.solution[dofs[i]];
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
      double row = 0.0;
      for (int j = 0; j < 8; ++j) row += ke[i][j] * ue[j];
      acc += ue[i] * row;
    }
    energy[e] = acc;
  }

  out.gradient.resize(n_elem * k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t e = 0; e < n_elem; ++e)
      out.gradient[j * n_elem + e] = -interp.derivative[j * n_elem + e] * energy[e];
  return out;
}

}  // namespace topt
