#include "topt/projection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "topt/errors.hpp"

namespace topt {

namespace {

inline double clip(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

constexpr double kGradFloor = 1e-300;

// Linearized residual of row j at dual value yj:
//   r(yj) = sum_i grad_ji * clip(yj*grad_ji, l-rho_i, u-rho_i) - g_hat_j.
// Monotone non-decreasing in yj. `subset` restricts the sum (independent
// path); entries with zero gradient contribute nothing either way.
double row_residual(const ConstraintLinearization& lin, std::size_t j,
                    std::span<const double> rho, double lower, double upper,
                    double yj, const std::vector<int>* subset) {
  const double* a = lin.row(j);
  double r = -lin.g_hat[j];
  if (subset) {
    for (int i : *subset)
      r += a[i] * clip(yj * a[i], lower - rho[i], upper - rho[i]);
  } else {
    for (std::size_t i = 0; i < lin.num_vars; ++i)
      r += a[i] * clip(yj * a[i], lower - rho[i], upper - rho[i]);
  }
  return r;
}

struct RowSearch {
  double y = 0.0;
  double residual = 0.0;
  int iters = 0;
};

// Algorithm-1 bisection for one constraint row. Equality rows search both
// sides of zero; inequality rows only [y_lower, 0].
RowSearch binary_search_row(const ConstraintLinearization& lin, std::size_t j,
                            std::span<const double> rho, double lower,
                            double upper, double tol_b, int maxiter,
                            const std::vector<int>* subset) {
  const bool equality = !lin.is_equality.empty() && lin.is_equality[j];
  const double r0 = row_residual(lin, j, rho, lower, upper, 0.0, subset);
  if (!equality && r0 <= 0.0) return {0.0, std::max(r0, 0.0), 0};
  if (equality && r0 == 0.0) return {0.0, 0.0, 0};

  const double* a = lin.row(j);
  double bp_lo = 0.0, bp_hi = 0.0;
  bool any = false;
  auto scan = [&](int i) {
    const double ai = a[i];
    if (std::abs(ai) < kGradFloor) return;
    any = true;
    const double c1 = (lower - rho[i]) / ai;
    const double c2 = (upper - rho[i]) / ai;
    bp_lo = std::min(bp_lo, std::min(c1, c2));
    bp_hi = std::max(bp_hi, std::max(c1, c2));
  };
  if (subset) {
    for (int i : *subset) scan(i);
  } else {
    for (std::size_t i = 0; i < lin.num_vars; ++i) scan(static_cast<int>(i));
  }
  if (!any)
    throw InfeasibleLinearization(
        "projection: constraint " + std::to_string(j) +
        " has a zero gradient but is violated at y = 0");

  double y_lo, y_hi;
  if (r0 > 0.0) {
    y_lo = bp_lo;
    y_hi = 0.0;
    if (row_residual(lin, j, rho, lower, upper, y_lo, subset) > 0.0)
      throw InfeasibleLinearization(
          "projection: linearized feasible set of constraint " +
          std::to_string(j) + " is empty within the box");
  } else {  // equality row below target: root lies at positive y
    y_lo = 0.0;
    y_hi = bp_hi;
    if (row_residual(lin, j, rho, lower, upper, y_hi, subset) < 0.0)
      throw InfeasibleLinearization(
          "projection: equality constraint " + std::to_string(j) +
          " is unreachable within the box");
  }

  RowSearch out;
  double ym = 0.5 * (y_lo + y_hi);
  while ((y_hi - y_lo) > tol_b && out.iters < maxiter) {
    const double rm = row_residual(lin, j, rho, lower, upper, ym, subset);
    if (rm > 0.0)
      y_hi = ym;
    else
      y_lo = ym;
    ym = 0.5 * (y_lo + y_hi);
    ++out.iters;
  }
  out.y = ym;
  out.residual = std::abs(row_residual(lin, j, rho, lower, upper, ym, subset));
  return out;
}

void check_sizes(const ConstraintLinearization& lin, std::span<const double> rho) {
  if (rho.size() != lin.num_vars)
    throw DomainError("projection: rho_tilde size does not match linearization");
}

}  // namespace

ConstraintLinearization ConstraintLinearization::build(
    std::size_t m, std::size_t n, std::vector<double> grad,
    std::vector<double> g_values, std::vector<double> bounds_g,
    std::vector<double> gd_step, std::vector<std::uint8_t> is_equality,
    std::optional<std::vector<std::vector<int>>> partition) {
  ConstraintLinearization lin;
  lin.num_constraints = m;
  lin.num_vars = n;
  lin.grad = std::move(grad);
  lin.g_values = std::move(g_values);
  lin.bounds_g = std::move(bounds_g);
  lin.gd_step = std::move(gd_step);
  lin.is_equality = is_equality.empty() ? std::vector<std::uint8_t>(m, 0)
                                        : std::move(is_equality);
  lin.partition = std::move(partition);
  if (lin.grad.size() != m * n || lin.g_values.size() != m ||
      lin.bounds_g.size() != m || lin.gd_step.size() != n ||
      lin.is_equality.size() != m)
    throw DomainError("ConstraintLinearization: inconsistent dimensions");

  lin.g_hat.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    double dot = 0.0;
    const double* a = lin.row(j);
    for (std::size_t i = 0; i < n; ++i) dot += lin.gd_step[i] * a[i];
    lin.g_hat[j] = lin.bounds_g[j] - lin.g_values[j] + dot;
  }
  if (lin.partition) lin.validate();
  return lin;
}

void ConstraintLinearization::validate() const {
  for (std::size_t j = 0; j < num_constraints; ++j) {
    double dot = 0.0;
    const double* a = row(j);
    for (std::size_t i = 0; i < num_vars; ++i) dot += gd_step[i] * a[i];
    const double expect = bounds_g[j] - g_values[j] + dot;
    const double scale = std::max({1.0, std::abs(expect), std::abs(g_hat[j])});
    if (std::abs(g_hat[j] - expect) > 1e-14 * scale)
      throw DomainError("ConstraintLinearization: g_hat inconsistent with fields");
  }
  if (!partition) return;
  if (partition->size() != num_constraints)
    throw DomainError("ConstraintLinearization: partition size != m");
  std::vector<std::uint8_t> owner(num_vars, 0);
  for (std::size_t j = 0; j < num_constraints; ++j) {
    for (int i : (*partition)[j]) {
      if (i < 0 || static_cast<std::size_t>(i) >= num_vars)
        throw DomainError("ConstraintLinearization: partition index out of range");
      if (owner[i]++)
        throw DomainError("ConstraintLinearization: partition sets overlap");
    }
  }
  for (std::size_t j = 0; j < num_constraints; ++j) {
    std::vector<std::uint8_t> in_set(num_vars, 0);
    for (int i : (*partition)[j]) in_set[i] = 1;
    const double* a = row(j);
    for (std::size_t i = 0; i < num_vars; ++i)
      if (!in_set[i] && a[i] != 0.0)
        throw DomainError(
            "ConstraintLinearization: gradient nonzero outside partition set");
  }
}

const char* to_string(ProjectionPath path) {
  switch (path) {
    case ProjectionPath::single_binary: return "single_binary";
    case ProjectionPath::independent_binary: return "independent_binary";
    case ProjectionPath::newton: return "newton";
  }
  return "unknown";
}

std::vector<double> delta_of_y(std::span<const double> y,
                               const ConstraintLinearization& lin,
                               std::span<const double> rho_tilde, double lower,
                               double upper) {
  check_sizes(lin, rho_tilde);
  if (y.size() != lin.num_constraints)
    throw DomainError("delta_of_y: dual size does not match linearization");
  std::vector<double> z(lin.num_vars, 0.0);
  for (std::size_t j = 0; j < lin.num_constraints; ++j) {
    const double yj = y[j];
    if (yj == 0.0) continue;
    const double* a = lin.row(j);
    for (std::size_t i = 0; i < lin.num_vars; ++i) z[i] += yj * a[i];
  }
  for (std::size_t i = 0; i < lin.num_vars; ++i)
    z[i] = clip(z[i], lower - rho_tilde[i], upper - rho_tilde[i]);
  return z;
}

ProjectionResult project_single_binary_search(std::span<const double> rho_tilde,
                                              const ConstraintLinearization& lin,
                                              double lower, double upper,
                                              double tol_b, int binary_maxiter) {
  check_sizes(lin, rho_tilde);
  if (lin.num_constraints != 1)
    throw DomainError("project_single_binary_search: exactly one constraint required");
  const RowSearch rs = binary_search_row(lin, 0, rho_tilde, lower, upper, tol_b,
                                         binary_maxiter, nullptr);
  ProjectionResult out;
  out.y = {rs.y};
  out.delta = delta_of_y(out.y, lin, rho_tilde, lower, upper);
  out.slacks = {0.0};
  out.path = ProjectionPath::single_binary;
  out.residual = rs.residual;
  return out;
}

ProjectionResult project_independent(std::span<const double> rho_tilde,
                                     const ConstraintLinearization& lin,
                                     double lower, double upper, double tol_b,
                                     int binary_maxiter) {
  check_sizes(lin, rho_tilde);
  if (!lin.partition)
    throw DomainError("project_independent: linearization has no partition");
  lin.validate();

  ProjectionResult out;
  out.y.assign(lin.num_constraints, 0.0);
  out.slacks.assign(lin.num_constraints, 0.0);
  out.path = ProjectionPath::independent_binary;
  for (std::size_t j = 0; j < lin.num_constraints; ++j) {
    const RowSearch rs = binary_search_row(lin, j, rho_tilde, lower, upper,
                                           tol_b, binary_maxiter,
                                           &(*lin.partition)[j]);
    out.y[j] = rs.y;
    out.residual = std::max(out.residual, rs.residual);
  }
  out.delta = delta_of_y(out.y, lin, rho_tilde, lower, upper);
  return out;
}

std::vector<double> constraint_residual_h(std::span<const double> y,
                                          const ConstraintLinearization& lin,
                                          std::span<const double> rho_tilde,
                                          double lower, double upper, double c) {
  if (!(c > 0.0)) throw ParameterError("constraint_residual_h: c must be > 0");
  const std::vector<double> delta = delta_of_y(y, lin, rho_tilde, lower, upper);
  std::vector<double> h(lin.num_constraints);
  for (std::size_t j = 0; j < lin.num_constraints; ++j) {
    const double* a = lin.row(j);
    double dot = 0.0;
    for (std::size_t i = 0; i < lin.num_vars; ++i) dot += a[i] * delta[i];
    h[j] = dot + y[j] / c - lin.g_hat[j];
  }
  return h;
}

namespace {

// State shared by the Newton iteration: delta(y), h(y), Phi(y).
struct NewtonEval {
  std::vector<double> delta;
  std::vector<double> h;
  Eigen::VectorXd phi;
  double merit = 0.0;
};

NewtonEval eval_phi(const Eigen::VectorXd& y, const ConstraintLinearization& lin,
                    std::span<const double> rho, double lower, double upper,
                    double c) {
  const std::size_t m = lin.num_constraints;
  NewtonEval ev;
  ev.delta = delta_of_y(std::span<const double>(y.data(), m), lin, rho, lower, upper);
  ev.h.resize(m);
  ev.phi.resize(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const double* a = lin.row(j);
    double dot = 0.0;
    for (std::size_t i = 0; i < lin.num_vars; ++i) dot += a[i] * ev.delta[i];
    ev.h[j] = dot + y[static_cast<Eigen::Index>(j)] / c - lin.g_hat[j];
    ev.phi[static_cast<Eigen::Index>(j)] =
        lin.is_equality[j] ? ev.h[j]
                           : std::min(-y[static_cast<Eigen::Index>(j)], -ev.h[j]);
  }
  ev.merit = 0.5 * ev.phi.squaredNorm();
  return ev;
}

}  // namespace

ProjectionResult project_general_newton(std::span<const double> rho_tilde,
                                        const ConstraintLinearization& lin,
                                        double lower, double upper,
                                        const ProjectionOptions& options) {
  check_sizes(lin, rho_tilde);
  const std::size_t m = lin.num_constraints;
  if (m < 1) throw DomainError("project_general_newton: no constraints");

  // Stage 1: assume a single active constraint; accept the first candidate
  // (by constraint index) that is feasible for every row.
  for (std::size_t j = 0; j < m; ++j) {
    RowSearch rs;
    try {
      rs = binary_search_row(lin, j, rho_tilde, lower, upper, options.tol_b,
                             options.binary_maxiter, nullptr);
    } catch (const InfeasibleLinearization&) {
      continue;
    }
    std::vector<double> y_trial(m, 0.0);
    y_trial[j] = rs.y;
    std::vector<double> delta = delta_of_y(y_trial, lin, rho_tilde, lower, upper);
    bool feasible = true;
    double worst = 0.0;
    for (std::size_t k = 0; k < m && feasible; ++k) {
      const double* a = lin.row(k);
      double dot = 0.0;
      for (std::size_t i = 0; i < lin.num_vars; ++i) dot += a[i] * delta[i];
      const double v = dot - lin.g_hat[k];
      const double viol = lin.is_equality[k] ? std::abs(v) : v;
      feasible = viol <= options.tol_n;
      worst = std::max(worst, std::abs(v));
    }
    if (feasible) {
      ProjectionResult out;
      out.delta = std::move(delta);
      out.y = std::move(y_trial);
      out.slacks.assign(m, 0.0);
      out.path = ProjectionPath::single_binary;
      out.residual = worst;
      return out;
    }
  }

  // Stage 2: semismooth Newton on Phi from y = 0.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  NewtonEval ev = eval_phi(y, lin, rho_tilde, lower, upper, options.c);

  ProjectionResult out;
  out.path = ProjectionPath::newton;
  Eigen::MatrixXd j_h(m, m), j_phi(m, m);
  Eigen::VectorXd step;
  bool have_prev_step = false;
  double prev_phi_sq = 0.0;

  while (ev.phi.lpNorm<Eigen::Infinity>() > options.tol_n &&
         out.newton_iters < options.newton_maxiter) {
    // J_h = A D A^T + I/C with D the interior-variable indicator.
    j_h.setZero();
    {
      std::vector<double> z(lin.num_vars, 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        const double yj = y[static_cast<Eigen::Index>(j)];
        if (yj == 0.0) continue;
        const double* a = lin.row(j);
        for (std::size_t i = 0; i < lin.num_vars; ++i) z[i] += yj * a[i];
      }
      for (std::size_t i = 0; i < lin.num_vars; ++i) {
        if (z[i] < lower - rho_tilde[i] || z[i] > upper - rho_tilde[i]) continue;
        for (std::size_t j = 0; j < m; ++j) {
          const double aji = lin.row(j)[i];
          if (aji == 0.0) continue;
          for (std::size_t k = j; k < m; ++k)
            j_h(j, k) += aji * lin.row(k)[i];
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = j + 1; k < m; ++k) j_h(k, j) = j_h(j, k);
        j_h(j, j) += 1.0 / options.c;
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (lin.is_equality[j]) {
        j_phi.row(jj) = j_h.row(jj);
      } else if (-y[jj] <= -ev.h[j]) {  // ties resolve to the -e_j branch
        j_phi.row(jj).setZero();
        j_phi(jj, jj) = -1.0;
      } else {
        j_phi.row(jj) = -j_h.row(jj);
      }
    }

    // Wolfe curvature check for the previous accepted step (diagnostic only;
    // the largest Armijo-passing step is always taken).
    if (have_prev_step) {
      const double curv = ev.phi.dot(j_phi * step);
      if (curv > 0.9 * prev_phi_sq) ++out.curvature_violations;
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(j_phi);
    if (!lu.isInvertible())
      throw NumericalError(
          "project_general_newton: singular Newton system (m = " +
          std::to_string(m) + ", residual = " +
          std::to_string(ev.phi.lpNorm<Eigen::Infinity>()) + ")");
    step = lu.solve(ev.phi);
    if (!step.allFinite())
      throw NumericalError("project_general_newton: non-finite Newton step");

    // Armijo backtracking on M = 0.5||Phi||^2; the directional derivative
    // along -step is -||Phi||^2.
    const double phi_sq = ev.phi.squaredNorm();
    const double merit0 = ev.merit;
    constexpr double c1 = 1e-4;
    double gamma = 1.0;
    NewtonEval trial;
    for (;;) {
      trial = eval_phi(y - gamma * step, lin, rho_tilde, lower, upper, options.c);
      if (trial.merit <= merit0 - c1 * gamma * phi_sq || gamma < 1e-16) break;
      gamma *= 0.5;
    }
    y -= gamma * step;
    step *= gamma;  // accepted step, for the next curvature check
    prev_phi_sq = gamma * phi_sq;
    have_prev_step = true;
    ev = std::move(trial);
    ++out.newton_iters;
  }

  out.residual = ev.phi.lpNorm<Eigen::Infinity>();
  out.converged = out.residual <= options.tol_n;
  out.delta = std::move(ev.delta);
  out.y.assign(y.data(), y.data() + m);
  out.slacks.resize(m);
  for (std::size_t j = 0; j < m; ++j) out.slacks[j] = -out.y[j] / options.c;
  return out;
}

ProjectionResult project(std::span<const double> rho_tilde,
                         const ConstraintLinearization& lin, double lower,
                         double upper, const ProjectionOptions& options) {
  if (lin.num_constraints == 1) {
    try {
      return project_single_binary_search(rho_tilde, lin, lower, upper,
                                          options.tol_b, options.binary_maxiter);
    } catch (const InfeasibleLinearization&) {
      return project_general_newton(rho_tilde, lin, lower, upper, options);
    }
  }
  if (lin.partition) {
    try {
      return project_independent(rho_tilde, lin, lower, upper, options.tol_b,
                                 options.binary_maxiter);
    } catch (const InfeasibleLinearization&) {
      return project_general_newton(rho_tilde, lin, lower, upper, options);
    }
  }
  return project_general_newton(rho_tilde, lin, lower, upper, options);
}

}  // namespace topt
