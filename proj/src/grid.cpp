#include "msdiff/grid.hpp"

#include <algorithm>
#include <cmath>

#include "msdiff/errors.hpp"

namespace msdiff {

Grid Grid::make(int d, std::span<const int> cells, std::span<const double> lengths) {
  if (d != 1 && d != 2) throw Error(ErrorKind::BadBounds, "grid dimension must be 1 or 2", "d");
  if (static_cast<int>(cells.size()) != d)
    throw Error(ErrorKind::DimensionMismatch, "cells needs one entry per axis", "cells");
  if (static_cast<int>(lengths.size()) != d)
    throw Error(ErrorKind::DimensionMismatch, "lengths needs one entry per axis", "lengths");
  Grid g;
  g.d_ = d;
  for (int a = 0; a < d; ++a) {
    if (cells[a] < 1)
      throw Error(ErrorKind::BadBounds, "cell count must be positive",
                  "cells[" + std::to_string(a) + "]");
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
      throw Error(ErrorKind::BadBounds, "length must be positive",
                  "lengths[" + std::to_string(a) + "]");
    g.cells_[a] = cells[a];
    g.lengths_[a] = lengths[a];
    g.spacing_[a] = lengths[a] / cells[a];
  }
  return g;
}

double Grid::min_spacing() const {
  return d_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

double Grid::cell_volume() const {
  return d_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
}

int Grid::num_faces(int axis) const {
  if (axis == 0) return (cells_[0] + 1) * cells_[1];
  if (d_ == 1) return 0;
  return cells_[0] * (cells_[1] + 1);
}

FaceField FaceField::zeros(const Grid& grid) {
  FaceField f;
  f.normal[0].assign(grid.num_faces(0), 0.0);
  f.normal[1].assign(grid.num_faces(1), 0.0);
  return f;
}

FaceField face_gradient(const Grid& grid, const Field& u) {
  FaceField g = FaceField::zeros(grid);
  const double inv_h[2] = {1.0 / grid.spacing(0), 1.0 / grid.spacing(1)};
  grid.for_each_interior_face([&](int axis, int f, int l, int r) {
    g.normal[axis][f] = (u[r] - u[l]) * inv_h[axis];
  });
  return g;
}

Field divergence(const Grid& grid, const FaceField& flux) {
  const int nx = grid.cells(0);
  const int ny = grid.cells(1);
  Field div(grid.num_cells(), 0.0);
  const double inv_hx = 1.0 / grid.spacing(0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      div[grid.index(i, j)] =
          (flux.normal[0][grid.face_index(0, i + 1, j)] - flux.normal[0][grid.face_index(0, i, j)]) *
          inv_hx;
  if (grid.dim() == 2) {
    const double inv_hy = 1.0 / grid.spacing(1);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        div[grid.index(i, j)] += (flux.normal[1][grid.face_index(1, i, j + 1)] -
                                  flux.normal[1][grid.face_index(1, i, j)]) *
                                 inv_hy;
  }
  return div;
}

Field laplacian(const Grid& grid, const Field& u) { return divergence(grid, face_gradient(grid, u)); }

Field cell_gradient(const Grid& grid, const Field& u, int axis) {
  const int nx = grid.cells(0);
  const int ny = grid.cells(1);
  const int n_axis = grid.cells(axis);
  const double inv_2h = 0.5 / grid.spacing(axis);
  Field g(grid.num_cells(), 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int k = axis == 0 ? i : j;
      const int lo = std::max(k - 1, 0);
      const int hi = std::min(k + 1, n_axis - 1);
      const int cell_lo = axis == 0 ? grid.index(lo, j) : grid.index(i, lo);
      const int cell_hi = axis == 0 ? grid.index(hi, j) : grid.index(i, hi);
      g[grid.index(i, j)] = (u[cell_hi] - u[cell_lo]) * inv_2h;
    }
  return g;
}

double integrate(const Grid& grid, const Field& u) {
  // Neumaier summation
  double sum = 0.0;
  double comp = 0.0;
  for (double v : u) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return (sum + comp) * grid.cell_volume();
}

double min_value(const Field& u) { return *std::min_element(u.begin(), u.end()); }
double max_value(const Field& u) { return *std::max_element(u.begin(), u.end()); }
double max_abs(const Field& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

namespace {

struct Stencil1 {
  int i0;
  int i1;
  double w;  // weight of i1
};

// Linear weights across cell centers with constant extension beyond them.
Stencil1 center_stencil(double x, double h, int n) {
  const double s = x / h - 0.5;
  if (n == 1 || s <= 0.0) return {0, 0, 0.0};
  if (s >= n - 1) return {n - 1, n - 1, 0.0};
  const int i0 = static_cast<int>(std::floor(s));
  return {i0, i0 + 1, s - i0};
}

// Linear weights across the n+1 faces of an axis.
Stencil1 face_stencil(double x, double h, int n) {
  const double s = std::clamp(x / h, 0.0, static_cast<double>(n));
  int i0 = static_cast<int>(std::floor(s));
  if (i0 >= n) i0 = n - 1;
  return {i0, i0 + 1, s - i0};
}

}  // namespace

double sample_cells(const Grid& grid, const Field& u, std::array<double, 2> x) {
  const Stencil1 sx = center_stencil(x[0], grid.spacing(0), grid.cells(0));
  if (grid.dim() == 1) return (1.0 - sx.w) * u[sx.i0] + sx.w * u[sx.i1];
  const Stencil1 sy = center_stencil(x[1], grid.spacing(1), grid.cells(1));
  const double lo = (1.0 - sx.w) * u[grid.index(sx.i0, sy.i0)] + sx.w * u[grid.index(sx.i1, sy.i0)];
  const double hi = (1.0 - sx.w) * u[grid.index(sx.i0, sy.i1)] + sx.w * u[grid.index(sx.i1, sy.i1)];
  return (1.0 - sy.w) * lo + sy.w * hi;
}

double sample_faces(const Grid& grid, const Field& face_values, int axis,
                    std::array<double, 2> x) {
  const int other = 1 - axis;
  const Stencil1 sa = face_stencil(x[axis], grid.spacing(axis), grid.cells(axis));
  if (grid.dim() == 1) return (1.0 - sa.w) * face_values[sa.i0] + sa.w * face_values[sa.i1];
  const Stencil1 so = center_stencil(x[other], grid.spacing(other), grid.cells(other));
  auto at = [&](int ia, int io) {
    return axis == 0 ? face_values[grid.face_index(0, ia, io)]
                     : face_values[grid.face_index(1, io, ia)];
  };
  const double lo = (1.0 - sa.w) * at(sa.i0, so.i0) + sa.w * at(sa.i1, so.i0);
  const double hi = (1.0 - sa.w) * at(sa.i0, so.i1) + sa.w * at(sa.i1, so.i1);
  return (1.0 - so.w) * lo + so.w * hi;
}

}  // namespace msdiff
