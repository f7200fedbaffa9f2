#include "podmci/mesh.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace podmci {

double FVMesh::total_volume() const {
  double v = 0.0;
  for (const auto& c : cells) v += c.volume;
  return v;
}

FVMesh build_spherical_mesh(double r_b, int n_cells) {
  if (r_b <= 0.0) throw std::invalid_argument("build_spherical_mesh: r_b must be positive");
  if (n_cells < 1) throw std::invalid_argument("build_spherical_mesh: n_cells must be >= 1");

  constexpr double four_pi = 4.0 * std::numbers::pi;
  const double dr = r_b / n_cells;

  FVMesh mesh;
  mesh.dimension = 1;
  mesh.cells.reserve(n_cells);
  mesh.faces.reserve(n_cells + 1);

  for (int i = 0; i < n_cells; ++i) {
    const double r_in = i * dr;
    const double r_out = (i + 1) * dr;
    Cell c;
    c.id = i;
    c.volume = four_pi / 3.0 * (r_out * r_out * r_out - r_in * r_in * r_in);
    c.centroid = {0.5 * (r_in + r_out), 0.0};
    c.region_id = 1;
    mesh.cells.push_back(c);
  }

  for (int f = 0; f <= n_cells; ++f) {
    const double r_f = f * dr;
    Face face;
    face.id = f;
    face.area = four_pi * r_f * r_f;
    if (f == 0) {
      face.owner = 0;
      face.d_if = 0.5 * dr;
      face.tag = BoundaryTag::reflective;  // zero area at r = 0
    } else if (f == n_cells) {
      face.owner = n_cells - 1;
      face.d_if = 0.5 * dr;
      face.tag = BoundaryTag::zero_flux;
    } else {
      face.owner = f - 1;
      face.neighbor = f;
      face.d_if = 0.5 * dr;
      face.d_in = dr;
      face.tag = BoundaryTag::interior;
    }
    mesh.cells[face.owner].face_ids.push_back(face.id);
    if (face.neighbor >= 0) mesh.cells[face.neighbor].face_ids.push_back(face.id);
    mesh.faces.push_back(face);
  }
  return mesh;
}

FVMesh build_cartesian_mesh(int nx, int ny, double dx, double dy,
                            const std::function<int(double, double)>& region_map,
                            const CartesianBoundary& boundary) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_cartesian_mesh: nx, ny must be >= 1");
  if (dx <= 0.0 || dy <= 0.0) throw std::invalid_argument("build_cartesian_mesh: dx, dy must be positive");

  FVMesh mesh;
  mesh.dimension = 2;
  mesh.cells.reserve(static_cast<std::size_t>(nx) * ny);

  auto cell_index = [nx](int i, int j) { return j * nx + i; };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double xc = (i + 0.5) * dx;
      const double yc = (j + 0.5) * dy;
      Cell c;
      c.id = cell_index(i, j);
      c.volume = dx * dy;
      c.centroid = {xc, yc};
      c.region_id = region_map(xc, yc);
      if (c.region_id <= 0) {
        std::ostringstream msg;
        msg << "build_cartesian_mesh: no region for cell center (" << xc << ", " << yc << ")";
        throw std::runtime_error(msg.str());
      }
      mesh.cells.push_back(c);
    }
  }

  auto add_face = [&mesh](double area, int owner, int neighbor, double d_if,
                          double d_in, BoundaryTag tag) {
    Face f;
    f.id = static_cast<int>(mesh.faces.size());
    f.area = area;
    f.owner = owner;
    f.neighbor = neighbor;
    f.d_if = d_if;
    f.d_in = d_in;
    f.tag = tag;
    mesh.cells[owner].face_ids.push_back(f.id);
    if (neighbor >= 0) mesh.cells[neighbor].face_ids.push_back(f.id);
    mesh.faces.push_back(f);
  };

  // Vertical faces (normal along x): area = dy per unit height.
  for (int j = 0; j < ny; ++j) {
    add_face(dy, cell_index(0, j), -1, 0.5 * dx, 0.0, boundary.left);
    for (int i = 1; i < nx; ++i) {
      add_face(dy, cell_index(i - 1, j), cell_index(i, j), 0.5 * dx, dx, BoundaryTag::interior);
    }
    add_face(dy, cell_index(nx - 1, j), -1, 0.5 * dx, 0.0, boundary.right);
  }
  // Horizontal faces (normal along y): area = dx per unit height.
  for (int i = 0; i < nx; ++i) {
    add_face(dx, cell_index(i, 0), -1, 0.5 * dy, 0.0, boundary.bottom);
    for (int j = 1; j < ny; ++j) {
      add_face(dx, cell_index(i, j - 1), cell_index(i, j), 0.5 * dy, dy, BoundaryTag::interior);
    }
    add_face(dx, cell_index(i, ny - 1), -1, 0.5 * dy, 0.0, boundary.top);
  }
  return mesh;
}

int RegionMap2D::region_at(double x, double y) const {
  const int i = static_cast<int>(x / pitch);
  const int j = static_cast<int>(y / pitch);
  if (i < 0 || i >= n || j < 0 || j >= n) {
    std::ostringstream msg;
    msg << "RegionMap2D: point (" << x << ", " << y << ") outside the " << n * pitch
        << " cm domain";
    throw std::out_of_range(msg.str());
  }
  return ids[static_cast<std::size_t>(j) * n + i];
}

RegionMap2D load_region_map(const std::string& path, double pitch) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_region_map: cannot open " + path);

  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::vector<int> row;
    int id;
    while (ls >> id) row.push_back(id);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_region_map: no rows in " + path);
  const std::size_t n = rows.size();
  for (const auto& row : rows) {
    if (row.size() != n) {
      throw std::runtime_error("load_region_map: map in " + path + " is not square");
    }
  }

  RegionMap2D map;
  map.n = static_cast<int>(n);
  map.pitch = pitch;
  map.ids.resize(n * n);
  // File lists the top assembly row first; store bottom row first.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      map.ids[j * n + i] = rows[n - 1 - j][i];
    }
  }
  return map;
}

}  // namespace podmci
