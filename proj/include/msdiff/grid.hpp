#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace msdiff {

/// Largest species count supported by the fixed-capacity small matrices.
inline constexpr int kMaxSpecies = 16;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxSpecies, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxSpecies, kMaxSpecies>;

/// Cell-centered scalar field, indexed by Grid::index.
using Field = std::vector<double>;

/// Uniform structured mesh on the box [0, L0] x [0, L1] (d = 1 or 2).
/// Boundaries are homogeneous Neumann: mirror ghost cells on every face.
///
/// In 1D the second axis is a single dummy layer so that 1D and 2D share
/// the same indexing; faces along axis 1 do not exist when d == 1.
class Grid {
 public:
  Grid() = default;

  /// Throws Error(BadBounds) for d outside {1,2}, non-positive cells or lengths.
  static Grid make(int d, std::span<const int> cells, std::span<const double> lengths);
  static Grid make_1d(int cells, double length) {
    const int c[] = {cells};
    const double l[] = {length};
    return make(1, c, l);
  }
  static Grid make_2d(int nx, int ny, double lx, double ly) {
    const int c[] = {nx, ny};
    const double l[] = {lx, ly};
    return make(2, c, l);
  }

  int dim() const { return d_; }
  int cells(int axis) const { return cells_[axis]; }
  double length(int axis) const { return lengths_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double min_spacing() const;
  int num_cells() const { return cells_[0] * cells_[1]; }
  double cell_volume() const;

  int index(int i, int j = 0) const { return i + cells_[0] * j; }
  int ix(int cell) const { return cell % cells_[0]; }
  int iy(int cell) const { return cell / cells_[0]; }
  double center(int axis, int i) const { return (i + 0.5) * spacing_[axis]; }

  /// Faces normal to `axis`. Axis 0: (nx+1)*ny faces, axis 1: nx*(ny+1).
  int num_faces(int axis) const;
  int face_index(int axis, int i, int j) const {
    return axis == 0 ? i + (cells_[0] + 1) * j : i + cells_[0] * j;
  }

  /// Calls fn(axis, face, left_cell, right_cell) for every interior face.
  template <class Fn>
  void for_each_interior_face(Fn&& fn) const {
    const int nx = cells_[0];
    const int ny = cells_[1];
    for (int j = 0; j < ny; ++j)
      for (int i = 1; i < nx; ++i) fn(0, face_index(0, i, j), index(i - 1, j), index(i, j));
    if (d_ == 2)
      for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) fn(1, face_index(1, i, j), index(i, j - 1), index(i, j));
  }

  bool operator==(const Grid&) const = default;

 private:
  int d_ = 1;
  std::array<int, 2> cells_{1, 1};
  std::array<double, 2> lengths_{1.0, 1.0};
  std::array<double, 2> spacing_{1.0, 1.0};
};

/// Normal components on the faces of each axis; boundary faces included.
struct FaceField {
  std::array<Field, 2> normal;

  static FaceField zeros(const Grid& grid);
};

/// Compact normal gradient (u_R - u_L)/h; exactly zero on boundary faces.
FaceField face_gradient(const Grid& grid, const Field& u);

/// Conservative divergence of face normal fluxes.
Field divergence(const Grid& grid, const FaceField& flux);

/// Five-point (three-point in 1D) Neumann Laplacian.
Field laplacian(const Grid& grid, const Field& u);

/// Centered cell gradient (u_{i+1} - u_{i-1})/(2h) along `axis` with mirror ghosts.
Field cell_gradient(const Grid& grid, const Field& u, int axis);

/// Discrete integral sum(u) * cell volume, compensated summation.
double integrate(const Grid& grid, const Field& u);

double min_value(const Field& u);
double max_value(const Field& u);
double max_abs(const Field& u);

/// Bilinear interpolation of a cell-centered field at point x, with the
/// Neumann (constant) extension between the outermost centers and the walls.
double sample_cells(const Grid& grid, const Field& u, std::array<double, 2> x);

/// Interpolates the axis-`axis` face components at point x: linear across
/// faces along `axis`, linear across cell centers along the other axis.
double sample_faces(const Grid& grid, const Field& face_values, int axis,
                    std::array<double, 2> x);

}  // namespace msdiff
