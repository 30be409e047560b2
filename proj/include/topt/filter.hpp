#ifndef TOPT_FILTER_HPP
#define TOPT_FILTER_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "topt/grid.hpp"

namespace topt {

/// Row-normalized linear hat kernel stored CSR-style. W[e][i] > 0 iff the
/// centroid distance between elements e and i (in element units) is below
/// the radius; every row sums to 1.
struct FilterKernel {
  std::size_t size = 0;  // N, rows == cols
  double radius = 0.0;   // element units
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> weight;

  bool is_identity() const { return col.size() == size; }
};

FilterKernel build_filter(const StructuredGrid& grid, double radius);

/// filtered = W * raw. Operates on one channel; callers loop channels.
std::vector<double> apply_filter(const FilterKernel& kernel, std::span<const double> raw);

/// Adjoint map W^T * grad (gradient w.r.t. filtered -> w.r.t. raw).
std::vector<double> filter_chain_rule(const FilterKernel& kernel,
                                      std::span<const double> grad_wrt_filtered);

}  // namespace topt

#endif
