#include "topt/grid.hpp"

#include <algorithm>

#include "topt/errors.hpp"

namespace topt {

StructuredGrid::StructuredGrid(int nx_, int ny_, double element_size_)
    : nx(nx_), ny(ny_), element_size(element_size_) {
  if (nx < 1 || ny < 1) throw ParameterError("grid: nx and ny must be >= 1");
  if (!(element_size > 0.0)) throw ParameterError("grid: element_size must be > 0");
}

std::array<int, 8> StructuredGrid::element_dofs(int e) const {
  const int ex = e % nx;
  const int ey = e / nx;
  const int n1 = node_index(ex, ey);
  const int n2 = node_index(ex + 1, ey);
  const int n3 = node_index(ex + 1, ey + 1);
  const int n4 = node_index(ex, ey + 1);
  return {2 * n1, 2 * n1 + 1, 2 * n2, 2 * n2 + 1,
          2 * n3, 2 * n3 + 1, 2 * n4, 2 * n4 + 1};
}

void BoundaryConditions::validate(const StructuredGrid& grid) const {
  if (fixed_dofs.empty())
    throw ParameterError("bc: no fixed dofs (rigid-body modes present)");
  const int ndof = static_cast<int>(grid.num_dofs());
  for (int d : fixed_dofs)
    if (d < 0 || d >= ndof) throw ParameterError("bc: fixed dof out of range");
  for (const auto& [dof, val] : loads) {
    if (dof < 0 || dof >= ndof) throw ParameterError("bc: load dof out of range");
    if (std::binary_search(fixed_dofs.begin(), fixed_dofs.end(), dof))
      throw ParameterError("bc: load applied on a fixed dof");
    (void)val;
  }
}

BoundaryConditions cantilever_bc(const StructuredGrid& grid, double load_magnitude) {
  BoundaryConditions bc;
  for (int iy = 0; iy <= grid.ny; ++iy) {
    const int n = grid.node_index(0, iy);
    bc.fixed_dofs.push_back(2 * n);
    bc.fixed_dofs.push_back(2 * n + 1);
  }
  std::sort(bc.fixed_dofs.begin(), bc.fixed_dofs.end());
  const int tip = grid.node_index(grid.nx, grid.ny / 2);
  bc.loads[2 * tip + 1] = -load_magnitude;
  return bc;
}

}  // namespace topt
