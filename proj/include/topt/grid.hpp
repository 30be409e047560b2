#ifndef TOPT_GRID_HPP
#define TOPT_GRID_HPP

#include <array>
#include <cstddef>
#include <unordered_map>
#include <vector>

namespace topt {

/// Regular grid of square bilinear elements, row-major indexing:
/// element e = ey*nx + ex, node n = iy*(nx+1) + ix, dofs (2n, 2n+1).
struct StructuredGrid {
  int nx = 1;
  int ny = 1;
  double element_size = 1.0;

  StructuredGrid() = default;
  StructuredGrid(int nx_, int ny_, double element_size_ = 1.0);

  std::size_t num_elements() const { return std::size_t(nx) * ny; }
  std::size_t num_nodes() const { return std::size_t(nx + 1) * (ny + 1); }
  std::size_t num_dofs() const { return 2 * num_nodes(); }

  int element_index(int ex, int ey) const { return ey * nx + ex; }
  int node_index(int ix, int iy) const { return iy * (nx + 1) + ix; }

  /// Physical centroid of element e.
  std::array<double, 2> centroid(int e) const {
    const int ex = e % nx;
    const int ey = e / nx;
    return {(ex + 0.5) * element_size, (ey + 0.5) * element_size};
  }

  /// Global dof indices of the element's 4 nodes, counterclockwise from
  /// the lower-left corner.
  std::array<int, 8> element_dofs(int e) const;
};

struct BoundaryConditions {
  std::vector<int> fixed_dofs;             // sorted, unique
  std::unordered_map<int, double> loads;   // dof -> force

  void validate(const StructuredGrid& grid) const;
};

/// Left edge fully clamped, unit downward point load at the midpoint of
/// the right edge (iy = ny/2, rounded down for odd ny).
BoundaryConditions cantilever_bc(const StructuredGrid& grid, double load_magnitude = 1.0);

}  // namespace topt

#endif
