#include "msdiff/reduced_solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "msdiff/errors.hpp"
#include "msdiff/ms_algebra.hpp"

namespace msdiff {

namespace {

enum FluxTerms : unsigned { kDiffusion = 1u, kLowerOrder = 2u, kAll = 3u };

struct FaceState {
  Vec c_prime;
  double c_tot;
  double T;
};

FaceState face_state(const FieldState& s, int l, int r, int m) {
  FaceState f{Vec(m), 0.5 * (s.c_tot[l] + s.c_tot[r]), 0.5 * (s.T[l] + s.T[r])};
  for (int i = 0; i < m; ++i) f.c_prime(i) = 0.5 * (s.c_prime[i][l] + s.c_prime[i][r]);
  return f;
}

Eigen::PartialPivLU<Mat> factor_F0(const FaceState& f, const MixtureSpec& spec) {
  const Mat F0 = build_F0(f.c_prime, f.c_tot, spec);
  Eigen::PartialPivLU<Mat> lu(F0);
  if (!(lu.rcond() > 1e-13))
    throw Error(ErrorKind::NumericallySingular,
                "F0 singular at a face (c_tot = " + std::to_string(f.c_tot) + ")");
  return lu;
}

// Normal fluxes of species 1..n-1 on every face for the selected terms.
std::vector<FaceField> reduced_face_fluxes(const FieldState& s, const Grid& grid,
                                           const MixtureSpec& spec, unsigned terms) {
  const int m = spec.n - 1;
  if (static_cast<int>(s.c_prime.size()) != m)
    throw Error(ErrorKind::DimensionMismatch, "state has wrong number of reduced species");
  std::vector<FaceField> J(m, FaceField::zeros(grid));
  const double inv_h[2] = {1.0 / grid.spacing(0), 1.0 / grid.spacing(1)};
  Vec rhs(m);
  grid.for_each_interior_face([&](int axis, int face, int l, int r) {
    const FaceState f = face_state(s, l, r, m);
    const double gT = (s.T[r] - s.T[l]) * inv_h[axis];
    const double gc = (s.c_tot[r] - s.c_tot[l]) * inv_h[axis];
    for (int i = 0; i < m; ++i) {
      double v = 0.0;
      if (terms & kDiffusion) v += f.T * (s.c_prime[i][r] - s.c_prime[i][l]) * inv_h[axis];
      if (terms & kLowerOrder) v += f.c_prime(i) * gT + spec.alpha * spec.K(i, m) * f.c_prime(i) * gc;
      rhs(i) = v;
    }
    const Vec j = -factor_F0(f, spec).solve(rhs);
    for (int i = 0; i < m; ++i) J[i].normal[axis][face] = j(i);
  });
  return J;
}

}  // namespace

Mat reduced_mobility(const Vec& c_prime, double c_tot, const MixtureSpec& spec) {
  return invert_F0(build_F0(c_prime, c_tot, spec));
}

std::vector<Field> lower_order_term(const FieldState& state, const Grid& grid,
                                    const MixtureSpec& spec, const ReducedOptions& options) {
  const auto J = reduced_face_fluxes(state, grid, spec, kLowerOrder);
  std::vector<Field> r;
  r.reserve(J.size());
  Field ctot_rate;
  if (options.include_ctot_rate) ctot_rate = laplacian(grid, state.c_tot);
  for (const auto& Ji : J) {
    Field ri = divergence(grid, Ji);
    for (std::size_t c = 0; c < ri.size(); ++c) {
      ri[c] = -ri[c];
      if (options.include_ctot_rate) ri[c] -= spec.alpha * ctot_rate[c];
    }
    r.push_back(std::move(ri));
  }
  return r;
}

double stable_dt(const FieldState& state, const Grid& grid, const MixtureSpec& spec) {
  const double h = grid.min_spacing();
  const double t_max = max_value(state.T);
  const double delta = spectral_bounds(spec).delta;
  return 0.45 * h * h * delta / (2.0 * grid.dim() * t_max);
}

std::vector<Field> reduced_step_explicit(const FieldState& state, double dt, const Grid& grid,
                                         const MixtureSpec& spec, const ReducedOptions& options,
                                         bool enforce_cfl) {
  if (enforce_cfl) {
    const double limit = stable_dt(state, grid, spec) / 0.45;
    if (dt > limit * (1.0 + 1e-12))
      throw Error(ErrorKind::CFLViolation, "reduced explicit step dt = " + std::to_string(dt) +
                                               " exceeds " + std::to_string(limit));
  }
  const auto J = reduced_face_fluxes(state, grid, spec, kAll);
  Field ctot_rate;
  if (options.include_ctot_rate) ctot_rate = laplacian(grid, state.c_tot);
  std::vector<Field> next = state.c_prime;
  for (std::size_t i = 0; i < J.size(); ++i) {
    const Field div = divergence(grid, J[i]);
    for (std::size_t c = 0; c < div.size(); ++c) {
      next[i][c] -= dt * div[c];
      if (options.include_ctot_rate) next[i][c] -= dt * spec.alpha * ctot_rate[c];
    }
  }
  return next;
}

std::vector<Field> reduced_step_semi_implicit(const FieldState& state, double dt, const Grid& grid,
                                              const MixtureSpec& spec,
                                              const ReducedOptions& options) {
  const int m = spec.n - 1;
  const int N = grid.num_cells();
  const auto r = lower_order_term(state, grid, spec, options);

  // unknown (species i, cell c) -> i * N + c
  std::vector<Eigen::Triplet<double>> triplets;
  for (int k = 0; k < m * N; ++k) triplets.emplace_back(k, k, 1.0);
  grid.for_each_interior_face([&](int axis, int, int l, int rcell) {
    const FaceState f = face_state(state, l, rcell, m);
    const Mat B = factor_F0(f, spec).inverse();
    const double h = grid.spacing(axis);
    const double w = dt * f.T / (h * h);
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        const double a = w * B(p, q);
        if (a == 0.0) continue;
        triplets.emplace_back(p * N + l, q * N + l, a);
        triplets.emplace_back(p * N + l, q * N + rcell, -a);
        triplets.emplace_back(p * N + rcell, q * N + rcell, a);
        triplets.emplace_back(p * N + rcell, q * N + l, -a);
      }
  });
  Eigen::SparseMatrix<double> A(m * N, m * N);
  A.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::LinearSolveFailure, "semi-implicit factorization failed");
  Eigen::VectorXd rhs(m * N);
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < N; ++c) rhs(i * N + c) = state.c_prime[i][c] + dt * r[i][c];
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorKind::LinearSolveFailure, "semi-implicit solve failed");
  std::vector<Field> next(m, Field(N));
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < N; ++c) next[i][c] = x(i * N + c);
  return next;
}

FluxSet reconstruct_fluxes(const FieldState& state, const Grid& grid, const MixtureSpec& spec) {
  FluxSet fs;
  fs.J = reduced_face_fluxes(state, grid, spec, kAll);
  FaceField Jn = FaceField::zeros(grid);
  const FaceField grad_ctot = face_gradient(grid, state.c_tot);
  double closure = 0.0;
  grid.for_each_interior_face([&](int axis, int face, int, int) {
    double sum = 0.0;
    for (const auto& Ji : fs.J) sum += Ji.normal[axis][face];
    const double closure_flux = -spec.alpha * grad_ctot.normal[axis][face];
    Jn.normal[axis][face] = closure_flux - sum;
    closure = std::max(closure, std::abs(sum + Jn.normal[axis][face] - closure_flux));
  });
  fs.J.push_back(std::move(Jn));
  fs.closure_residual = closure;
  return fs;
}

LastSpecies recover_last_species(const std::vector<Field>& c_prime, const Field& c_tot,
                                 double tol_neg) {
  LastSpecies out{c_tot, 0.0, 0};
  for (const auto& ci : c_prime) {
    if (ci.size() != c_tot.size())
      throw Error(ErrorKind::DimensionMismatch, "species field size does not match c_tot");
    for (std::size_t c = 0; c < ci.size(); ++c) out.c_n[c] -= ci[c];
  }
  out.min_value = min_value(out.c_n);
  for (double v : out.c_n)
    if (v < -tol_neg) ++out.negativity_events;
  return out;
}

}  // namespace msdiff
