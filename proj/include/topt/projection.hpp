#ifndef TOPT_PROJECTION_HPP
#define TOPT_PROJECTION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace topt {

/// Per-iteration linearization of the constraints g_j at rho_t, feeding the
/// projection solvers. The projection acts on rho_tilde = rho_t - gd_step and
/// solves
///   min ||delta||^2  s.t.  l <= rho_tilde + delta <= u,
///                          delta^T grad_j <= g_hat_j  (== for equality rows)
/// with g_hat_j = bounds_g_j - g_values_j + gd_step^T grad_j.
struct ConstraintLinearization {
  std::size_t num_constraints = 0;  // m
  std::size_t num_vars = 0;         // N
  std::vector<double> grad;         // m*N, row-major
  std::vector<double> g_values;     // m, g_j(rho_t)
  std::vector<double> bounds_g;     // m, G_j
  std::vector<double> gd_step;      // N, omega*alpha*d (the subtracted step)
  std::vector<double> g_hat;        // m, derived
  std::vector<std::uint8_t> is_equality;  // m
  // Disjoint variable index sets, one per constraint; grad_j vanishes
  // outside its set. Enables the per-constraint binary-search path.
  std::optional<std::vector<std::vector<int>>> partition;

  static ConstraintLinearization build(
      std::size_t m, std::size_t n, std::vector<double> grad,
      std::vector<double> g_values, std::vector<double> bounds_g,
      std::vector<double> gd_step,
      std::vector<std::uint8_t> is_equality = {},
      std::optional<std::vector<std::vector<int>>> partition = std::nullopt);

  const double* row(std::size_t j) const { return grad.data() + j * num_vars; }

  /// Recheck the g_hat consistency invariant (1e-14) and partition validity.
  void validate() const;
};

enum class ProjectionPath { single_binary, independent_binary, newton };

const char* to_string(ProjectionPath path);

struct ProjectionResult {
  std::vector<double> delta;   // N
  std::vector<double> y;       // m duals; <= 0 on inequality rows
  std::vector<double> slacks;  // m, -y/C on the newton path, 0 otherwise
  ProjectionPath path = ProjectionPath::single_binary;
  int newton_iters = 0;
  double residual = 0.0;  // ||Phi||_inf at exit (newton), |r(y)| otherwise
  bool converged = true;
  int curvature_violations = 0;  // Wolfe curvature checks failed (diagnostic)
};

struct ProjectionOptions {
  double c = 1e12;      // slack penalty
  double tol_b = 1e-8;  // binary search interval tolerance (absolute, on y)
  double tol_n = 1e-6;  // Newton residual / feasibility tolerance
  int newton_maxiter = 50;
  int binary_maxiter = 200;
};

/// Theorem-1 candidate: delta_i = clip(sum_j y_j grad_ji, l-rho_i, u-rho_i).
std::vector<double> delta_of_y(std::span<const double> y,
                               const ConstraintLinearization& lin,
                               std::span<const double> rho_tilde,
                               double lower, double upper);

/// Single-constraint projection by dual bisection. Requires m == 1.
/// Throws InfeasibleLinearization when the constraint gradient vanishes or
/// the linearized feasible set is empty (callers fall back to the
/// regularized Newton path).
ProjectionResult project_single_binary_search(std::span<const double> rho_tilde,
                                              const ConstraintLinearization& lin,
                                              double lower, double upper,
                                              double tol_b,
                                              int binary_maxiter = 200);

/// Independent-constraint projection: one bisection per constraint over its
/// partition block. Requires a valid partition.
ProjectionResult project_independent(std::span<const double> rho_tilde,
                                     const ConstraintLinearization& lin,
                                     double lower, double upper, double tol_b,
                                     int binary_maxiter = 200);

/// h_j(y) = delta(y)^T grad_j + y_j / c - g_hat_j.
std::vector<double> constraint_residual_h(std::span<const double> y,
                                          const ConstraintLinearization& lin,
                                          std::span<const double> rho_tilde,
                                          double lower, double upper, double c);

/// General multi-constraint solver: per-constraint binary-search trials
/// first, then semismooth Newton on
///   Phi_j = min(-y_j, -h_j)  (inequality)   Phi_j = h_j  (equality)
/// with Jacobian rows switched between -e_j and -(J_h)_j and an Armijo
/// backtracking line search on M = 0.5 ||Phi||^2.
ProjectionResult project_general_newton(std::span<const double> rho_tilde,
                                        const ConstraintLinearization& lin,
                                        double lower, double upper,
                                        const ProjectionOptions& options = {});

/// Path dispatch: single constraint -> bisection, partitioned -> independent,
/// otherwise -> general Newton. Bisection failures fall back to Newton.
ProjectionResult project(std::span<const double> rho_tilde,
                         const ConstraintLinearization& lin, double lower,
                         double upper, const ProjectionOptions& options = {});

}  // namespace topt

#endif
