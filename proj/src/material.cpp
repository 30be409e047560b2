#include "topt/material.hpp"

#include <cmath>

#include "topt/errors.hpp"

namespace topt {

void MaterialModel::validate() const {
  if (young_moduli.empty()) throw ParameterError("material: no young moduli");
  if (!(e_min > 0.0)) throw ParameterError("material: e_min must be > 0");
  for (double e : young_moduli)
    if (!(e > e_min)) throw ParameterError("material: every E_j must exceed e_min");
  if (!(poisson > 0.0 && poisson < 0.5))
    throw ParameterError("material: poisson must lie in (0, 0.5)");
  if (!(penalty >= 1.0)) throw ParameterError("material: penalty must be >= 1");
}

StiffnessInterpolation interpolate_stiffness(std::span<const double> densities,
                                             std::size_t num_elements,
                                             const MaterialModel& model) {
  model.validate();
  const std::size_t k = model.num_materials();
  if (densities.size() != num_elements * k)
    throw DomainError("interpolate_stiffness: density vector size mismatch");
  constexpr double slack = 1e-12;
  for (double r : densities)
    if (!(r >= -slack && r <= 1.0 + slack))
      throw DomainError("interpolate_stiffness: density outside [0,1]");

  StiffnessInterpolation out;
  out.moduli.assign(num_elements, model.e_min);
  out.derivative.resize(num_elements * k);
  const double p = model.penalty;
  for (std::size_t j = 0; j < k; ++j) {
    const double scale = model.young_moduli[j] - model.e_min;
    const double* rho_j = densities.data() + j * num_elements;
    double* der_j = out.derivative.data() + j * num_elements;
    for (std::size_t e = 0; e < num_elements; ++e) {
      const double r = std::min(1.0, std::max(0.0, rho_j[e]));
      out.moduli[e] += std::pow(r, p) * scale;
      der_j[e] = p * std::pow(r, p - 1.0) * scale;
    }
  }
  return out;
}

}  // namespace topt
