#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace podmci {

enum class BoundaryTag { interior, zero_flux, reflective };

struct Cell {
  int id = -1;
  double volume = 0.0;            // cm^3, or cm^2 per unit height in 2-D
  std::array<double, 2> centroid{0.0, 0.0};  // (r) or (x, y), cm
  int region_id = 0;
  std::vector<int> face_ids;
};

struct Face {
  int id = -1;
  double area = 0.0;  // cm^2, or cm per unit height in 2-D
  int owner = -1;
  int neighbor = -1;  // -1 on boundary faces
  double d_if = 0.0;  // owner centroid to face center, cm
  double d_in = 0.0;  // owner centroid to neighbor centroid (interior), cm
  BoundaryTag tag = BoundaryTag::interior;
};

// Finite-volume grid: cells with volumes/centroids and faces carrying the
// adjacency and distance metadata the discretization needs.
struct FVMesh {
  int dimension = 1;
  std::vector<Cell> cells;
  std::vector<Face> faces;

  double total_volume() const;
};

// Uniform 1-D spherical shells on [0, r_b]. The center face (r = 0) is a
// zero-area reflective face so the operator needs no special casing; the
// outer face is zero-flux.
FVMesh build_spherical_mesh(double r_b, int n_cells);

struct CartesianBoundary {
  BoundaryTag left = BoundaryTag::reflective;
  BoundaryTag bottom = BoundaryTag::reflective;
  BoundaryTag right = BoundaryTag::zero_flux;
  BoundaryTag top = BoundaryTag::zero_flux;
};

// Uniform 2-D rectangles; region ids come from the map evaluated at each cell
// center. The map returns a positive region id or throws/returns <= 0 for an
// unknown position.
FVMesh build_cartesian_mesh(int nx, int ny, double dx, double dy,
                            const std::function<int(double, double)>& region_map,
                            const CartesianBoundary& boundary = {});

// 11x11 LRA quarter-core assembly layout parsed from a plain-text map file:
// one row of 11 region ids per 15-cm assembly row, top row (y = 165 cm) first.
struct RegionMap2D {
  int n = 0;          // assemblies per side
  double pitch = 0.0; // cm
  std::vector<int> ids;  // row-major from the bottom row

  int region_at(double x, double y) const;
};

RegionMap2D load_region_map(const std::string& path, double pitch = 15.0);

}  // namespace podmci
