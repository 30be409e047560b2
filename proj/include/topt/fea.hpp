#ifndef TOPT_FEA_HPP
#define TOPT_FEA_HPP

#include <Eigen/Sparse>
#include <array>
#include <span>
#include <vector>

#include "topt/grid.hpp"
#include "topt/material.hpp"

namespace topt {

using ElementMatrix = std::array<std::array<double, 8>, 8>;

/// Unit-modulus plane-stress Q4 stiffness (2x2 Gauss, unit thickness).
/// Independent of element_size for square elements.
ElementMatrix element_stiffness_q4(double poisson, double element_size);

struct SolveOptions {
  double rel_tolerance = 1e-8;
  // Free-dof systems below this size are solved densely.
  int dense_threshold = 200;
  bool force_iterative = false;
};

struct LinearSystem {
  Eigen::SparseMatrix<double> stiffness;  // free dofs only
  Eigen::VectorXd rhs;                    // free dofs only
  std::vector<double> solution;           // all dofs, fixed entries zero
  std::vector<int> free_dofs;
  int iterations = 0;
  double residual = 0.0;  // relative, ||K u - f|| / ||f||
};

LinearSystem assemble_and_solve(const StructuredGrid& grid,
                                const BoundaryConditions& bc,
                                std::span<const double> element_moduli,
                                double poisson = 0.3,
                                const SolveOptions& options = {});

struct ComplianceResult {
  double compliance = 0.0;
  std::vector<double> gradient;  // N*K, channel-major, w.r.t. the supplied densities
  int solver_iterations = 0;
};

/// Compliance f^T u and its adjoint gradient w.r.t. the (already filtered)
/// densities. Callers apply the filter chain rule to map into raw space.
ComplianceResult compliance_and_gradient(const StructuredGrid& grid,
                                         const BoundaryConditions& bc,
                                         std::span<const double> densities,
                                         const MaterialModel& model,
                                         const SolveOptions& options = {});

}  // namespace topt

#endif
