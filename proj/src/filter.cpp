#include "topt/filter.hpp"

#include <algorithm>
#include <cmath>

#include "topt/errors.hpp"

namespace topt {

FilterKernel build_filter(const StructuredGrid& grid, double radius) {
  if (!(radius > 0.0)) throw ParameterError("build_filter: radius must be > 0");

  FilterKernel k;
  k.size = grid.num_elements();
  k.radius = radius;
  k.row_ptr.reserve(k.size + 1);
  k.row_ptr.push_back(0);

  const int reach = std::max(0, static_cast<int>(std::ceil(radius)) - 1);
  for (int ey = 0; ey < grid.ny; ++ey) {
    for (int ex = 0; ex < grid.nx; ++ex) {
      const int row_begin = static_cast<int>(k.col.size());
      double total = 0.0;
      for (int dy = -reach; dy <= reach; ++dy) {
        const int iy = ey + dy;
        if (iy < 0 || iy >= grid.ny) continue;
        for (int dx = -reach; dx <= reach; ++dx) {
          const int ix = ex + dx;
          if (ix < 0 || ix >= grid.nx) continue;
          const double w = radius - std::hypot(double(dx), double(dy));
          if (w <= 0.0) continue;
          k.col.push_back(grid.element_index(ix, iy));
          k.weight.push_back(w);
          total += w;
        }
      }
      for (int i = row_begin; i < static_cast<int>(k.col.size()); ++i)
        k.weight[i] /= total;
      k.row_ptr.push_back(static_cast<int>(k.col.size()));
    }
  }
  return k;
}

std::vector<double> apply_filter(const FilterKernel& kernel, std::span<const double> raw) {
  if (raw.size() != kernel.size)
    throw DomainError("apply_filter: field size does not match kernel");
  std::vector<double> out(kernel.size);
  for (std::size_t e = 0; e < kernel.size; ++e) {
    double acc = 0.0;
    for (int i = kernel.row_ptr[e]; i < kernel.row_ptr[e + 1]; ++i)
      acc += kernel.weight[i] * raw[kernel.col[i]];
    out[e] = acc;
  }
  return out;
}

std::vector<double> filter_chain_rule(const FilterKernel& kernel,
                                      std::span<const double> grad_wrt_filtered) {
  if (grad_wrt_filtered.size() != kernel.size)
    throw DomainError("filter_chain_rule: gradient size does not match kernel");
  std::vector<double> out(kernel.size, 0.0);
  for (std::size_t e = 0; e < kernel.size; ++e) {
    const double g = grad_wrt_filtered[e];
    for (int i = kernel.row_ptr[e]; i < kernel.row_ptr[e + 1]; ++i)
      out[kernel.col[i]] += kernel.weight[i] * g;
  }
  return out;
}

}  // namespace topt
