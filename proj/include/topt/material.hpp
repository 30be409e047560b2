#ifndef TOPT_MATERIAL_HPP
#define TOPT_MATERIAL_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace topt {

/// SIMP material data. For K materials the element modulus is the
/// penalized additive mixture
///   E_e = e_min + sum_j rho_{e,j}^p (E_j - e_min).
struct MaterialModel {
  std::vector<double> young_moduli{1.0};
  double e_min = 1e-9;
  double poisson = 0.3;
  double penalty = 3.0;

  std::size_t num_materials() const { return young_moduli.size(); }
  void validate() const;
};

struct StiffnessInterpolation {
  std::vector<double> moduli;       // N
  std::vector<double> derivative;   // N*K, channel-major: d(E_e)/d(rho_{e,j}) at j*N + e
};

/// densities: N*K values, channel-major (channel j occupies [j*N, (j+1)*N)).
/// Values outside [0,1] by more than 1e-12 are rejected.
StiffnessInterpolation interpolate_stiffness(std::span<const double> densities,
                                             std::size_t num_elements,
                                             const MaterialModel& model);

}  // namespace topt

#endif
