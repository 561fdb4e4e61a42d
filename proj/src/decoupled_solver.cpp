#include "msdiff/decoupled_solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "msdiff/errors.hpp"

namespace msdiff {

double heat_dt_limit(double alpha, const Grid& grid) {
  const double h = grid.min_spacing();
  return h * h / (2.0 * grid.dim() * alpha);
}

double heat_stable_dt(double alpha, const Grid& grid) { return 0.45 * heat_dt_limit(alpha, grid); }

namespace {

Field heat_step_implicit(const Field& c_tot, double dt, double alpha, const Grid& grid) {
  const int N = grid.num_cells();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(N) * (1 + 2 * grid.dim()) * 2);
  for (int c = 0; c < N; ++c) triplets.emplace_back(c, c, 1.0);
  grid.for_each_interior_face([&](int axis, int, int l, int r) {
    const double h = grid.spacing(axis);
    const double w = dt * alpha / (h * h);
    triplets.emplace_back(l, l, w);
    triplets.emplace_back(l, r, -w);
    triplets.emplace_back(r, r, w);
    triplets.emplace_back(r, l, -w);
  });
  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::LinearSolveFailure, "implicit heat factorization failed");
  const Eigen::Map<const Eigen::VectorXd> rhs(c_tot.data(), N);
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::LinearSolveFailure, "implicit heat solve failed");
  return Field(x.data(), x.data() + N);
}

}  // namespace

Field heat_step(const Field& c_tot, double dt, double alpha, const Grid& grid, HeatScheme scheme,
                bool enforce_cfl) {
  if (static_cast<int>(c_tot.size()) != grid.num_cells())
    throw Error(ErrorKind::DimensionMismatch, "c_tot size does not match grid");
  if (scheme == HeatScheme::Implicit) return heat_step_implicit(c_tot, dt, alpha, grid);

  const double limit = heat_dt_limit(alpha, grid);
  if (enforce_cfl && dt > limit * (1.0 + 1e-12))
    throw Error(ErrorKind::CFLViolation,
                "explicit heat step dt = " + std::to_string(dt) + " exceeds " + std::to_string(limit));
  FaceField flux = face_gradient(grid, c_tot);
  Field div = divergence(grid, flux);
  Field next(c_tot);
  for (std::size_t c = 0; c < next.size(); ++c) next[c] += dt * alpha * div[c];
  return next;
}

Field dt_log_ctot(const Field& c_tot, double alpha, const Grid& grid) {
  Field s = laplacian(grid, c_tot);
  for (std::size_t c = 0; c < s.size(); ++c) {
    if (!(c_tot[c] > 0.0))
      throw Error(ErrorKind::NumericallySingular, "non-positive total concentration at cell " +
                                                      std::to_string(c));
    s[c] *= alpha / c_tot[c];
  }
  return s;
}

Field VelocityField::cell_component(const Grid& grid, int axis) const {
  Field v(grid.num_cells(), 0.0);
  if (axis >= grid.dim()) return v;
  for (int c = 0; c < grid.num_cells(); ++c) {
    const int i = grid.ix(c);
    const int j = grid.iy(c);
    const int lo = axis == 0 ? grid.face_index(0, i, j) : grid.face_index(1, i, j);
    const int hi = axis == 0 ? grid.face_index(0, i + 1, j) : grid.face_index(1, i, j + 1);
    v[c] = 0.5 * (faces.normal[axis][lo] + faces.normal[axis][hi]);
  }
  return v;
}

double VelocityField::max_abs() const {
  return std::max(msdiff::max_abs(faces.normal[0]),
                  faces.normal[1].empty() ? 0.0 : msdiff::max_abs(faces.normal[1]));
}

VelocityField advection_velocity(const Field& c_tot, double alpha, const Grid& grid) {
  Field log_c(c_tot.size());
  for (std::size_t c = 0; c < c_tot.size(); ++c) {
    if (!(c_tot[c] > 0.0))
      throw Error(ErrorKind::NumericallySingular, "non-positive total concentration");
    log_c[c] = std::log(c_tot[c]);
  }
  VelocityField V{face_gradient(grid, log_c)};
  const double scale = -5.0 * alpha / 3.0;
  for (auto& comp : V.faces.normal)
    for (double& v : comp) v *= scale;
  return V;
}

double advective_dt_limit(const VelocityField& V, const Grid& grid) {
  double rate = 0.0;
  for (int a = 0; a < grid.dim(); ++a) rate += max_abs(V.faces.normal[a]) / grid.spacing(a);
  return rate > 0.0 ? 0.9 / rate : std::numeric_limits<double>::infinity();
}

Field temperature_step_upwind(const Field& T, const VelocityField& V, const Field& s, double dt,
                              const Grid& grid, bool enforce_cfl) {
  if (enforce_cfl) {
    const double limit = advective_dt_limit(V, grid);
    if (dt > limit * (1.0 + 1e-12))
      throw Error(ErrorKind::CFLViolation, "upwind step dt = " + std::to_string(dt) +
                                               " exceeds advective limit " + std::to_string(limit));
  }
  Field next(T);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const Field v = V.cell_component(grid, axis);
    const int n_axis = grid.cells(axis);
    const double inv_h = 1.0 / grid.spacing(axis);
    for (int c = 0; c < grid.num_cells(); ++c) {
      const int k = axis == 0 ? grid.ix(c) : grid.iy(c);
      const int stride = axis == 0 ? 1 : grid.cells(0);
      // mirror ghosts: the one-sided difference into a wall vanishes
      const double back = k > 0 ? T[c] - T[c - stride] : 0.0;
      const double fwd = k < n_axis - 1 ? T[c + stride] - T[c] : 0.0;
      const double vc = v[c];
      next[c] -= dt * inv_h * (vc > 0.0 ? vc * back : vc * fwd);
    }
  }
  for (std::size_t c = 0; c < next.size(); ++c) next[c] += dt * (2.0 / 3.0) * s[c] * T[c];
  return next;
}

void CtotHistory::push(double t, Field c_tot) {
  if (!times_.empty() && !(t > times_.back()))
    throw Error(ErrorKind::ValidationError, "history times must be strictly increasing");
  times_.push_back(t);
  fields_.push_back(std::move(c_tot));
  if (capacity_ > 0 && times_.size() > capacity_) {
    times_.pop_front();
    fields_.pop_front();
  }
}

namespace {

struct Derived {
  VelocityField V;
  Field s;
};

Derived derive(const Field& c_tot, double alpha, const Grid& grid) {
  return {advection_velocity(c_tot, alpha, grid), dt_log_ctot(c_tot, alpha, grid)};
}

using Point = std::array<double, 2>;

}  // namespace

Field temperature_characteristics(const Field& T_in, const CtotHistory& history, double t_query,
                                  double alpha, const Grid& grid) {
  if (history.empty()) throw Error(ErrorKind::ValidationError, "empty c_tot history");
  const double t_eps = 1e-12 * std::max(1.0, std::abs(t_query));
  if (std::abs(history.time(0)) > t_eps)
    throw Error(ErrorKind::ValidationError, "history does not start at t = 0");
  if (t_query > history.time(history.size() - 1) + t_eps || t_query < -t_eps)
    throw Error(ErrorKind::ValidationError, "t_query outside the history range");

  const int N = grid.num_cells();
  const int d = grid.dim();
  std::vector<Point> X(N);
  for (int c = 0; c < N; ++c)
    X[c] = {grid.center(0, grid.ix(c)), d == 2 ? grid.center(1, grid.iy(c)) : 0.0};
  std::vector<double> exponent(N, 0.0);

  std::size_t k_hi = 0;
  while (k_hi + 1 < history.size() && history.time(k_hi) < t_query - t_eps) ++k_hi;

  auto check = [&](Point& p) {
    for (int a = 0; a < d; ++a) {
      const double L = grid.length(a);
      const double h = grid.spacing(a);
      if (p[a] < -h || p[a] > L + h || !std::isfinite(p[a]))
        throw Error(ErrorKind::TrajectoryExit,
                    "characteristic left the domain along axis " + std::to_string(a));
      p[a] = std::clamp(p[a], 0.0, L);
    }
  };

  if (k_hi > 0) {
    Derived hi = derive(history.snapshot(k_hi), alpha, grid);
    std::vector<double> src_cur(N);
    bool have_src = false;
    for (std::size_t k = k_hi; k >= 1; --k) {
      Derived lo = derive(history.snapshot(k - 1), alpha, grid);
      const double t_lo = history.time(k - 1);
      const double t_hi = history.time(k);
      const double start = std::min(t_hi, t_query);
      const double span = start - t_lo;
      if (span > 0.0) {
        const double vmax = std::max(lo.V.max_abs(), hi.V.max_abs());
        double h_max = span;
        if (vmax > 0.0) h_max = std::min(h_max, 0.5 * grid.min_spacing() / vmax);
        const int nsub = std::max(1, static_cast<int>(std::ceil(span / h_max - 1e-9)));
        const double h = span / nsub;
        const double inv_interval = 1.0 / (t_hi - t_lo);

        auto velocity = [&](double tau, const Point& p) {
          const double w = (tau - t_lo) * inv_interval;
          Point v{0.0, 0.0};
          for (int a = 0; a < d; ++a)
            v[a] = (1.0 - w) * sample_faces(grid, lo.V.faces.normal[a], a, p) +
                   w * sample_faces(grid, hi.V.faces.normal[a], a, p);
          return v;
        };
        auto source = [&](double tau, const Point& p) {
          const double w = (tau - t_lo) * inv_interval;
          return (1.0 - w) * sample_cells(grid, lo.s, p) + w * sample_cells(grid, hi.s, p);
        };

        if (!have_src) {
          for (int c = 0; c < N; ++c) src_cur[c] = source(start, X[c]);
          have_src = true;
        }
        for (int sub = 0; sub < nsub; ++sub) {
          const double tau = start - sub * h;
          for (int c = 0; c < N; ++c) {
            Point& p = X[c];
            const Point v1 = velocity(tau, p);
            Point mid{p[0] - 0.5 * h * v1[0], p[1] - 0.5 * h * v1[1]};
            check(mid);
            const Point v2 = velocity(tau - 0.5 * h, mid);
            p = {p[0] - h * v2[0], p[1] - h * v2[1]};
            check(p);
            const double src_next = source(tau - h, p);
            exponent[c] += 0.5 * h * (src_cur[c] + src_next);
            src_cur[c] = src_next;
          }
        }
      }
      hi = std::move(lo);
    }
  }

  Field T(N);
  for (int c = 0; c < N; ++c)
    T[c] = sample_cells(grid, T_in, X[c]) * std::exp((2.0 / 3.0) * exponent[c]);
  return T;
}

}  // namespace msdiff
