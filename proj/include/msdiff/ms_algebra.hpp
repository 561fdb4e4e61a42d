#pragma once

#include <complex>
#include <string>
#include <vector>

#include "msdiff/core_model.hpp"
#include "msdiff/grid.hpp"

namespace msdiff {

/// Friction matrix of the flux-gradient relation D = F J at one point:
///   F_ij = k_ij c_i (j != i),  F_ii = -sum_{r != i} k_ir c_r.
/// Its columns sum to zero, so Ker F^T = span{1}. Throws DimensionMismatch.
Mat build_F(const Vec& c, const MixtureSpec& spec);

/// Reduced (n-1)x(n-1) matrix obtained by eliminating species n:
///   [F0]_ij = -(k_ij - k_in) c_i                      (i != j)
///   [F0]_ii = sum_{j != i} (k_ij - k_in) c_j + c_tot k_in
Mat build_F0(const Vec& c_prime, double c_tot, const MixtureSpec& spec);

/// Dense LU inverse of F0. Throws NumericallySingular when F0 is
/// (numerically) singular, which only happens outside the admissible set.
Mat invert_F0(const Mat& F0);

/// c~'_i = k_in c_i.
Vec scaled_concentration(const Vec& c_prime, const MixtureSpec& spec);

/// delta = c_min min_{i!=j} k_ij,  eta = 2 c_max sum_{i, j!=i} k_ij
/// (ordered pairs, each unordered pair counted twice).
struct SpectralBounds {
  double delta = 0.0;
  double eta = 0.0;
};
SpectralBounds spectral_bounds(const MixtureSpec& spec);

/// Target set for an eigenvalue inclusion test: [lo, hi] on the real axis,
/// optionally united with {0}.
struct SpectralTarget {
  double lo = 0.0;
  double hi = 0.0;
  bool include_zero = false;
};

struct SpectralReport {
  std::string tag;
  std::vector<std::complex<double>> eigenvalues;
  SpectralTarget target;
  double tol = 0.0;
  bool pass = false;
  /// Smallest signed slack over all eigenvalues; negative means outside.
  double worst_margin = 0.0;
  /// Eigenvalues with |lambda| <= tol.
  int near_zero = 0;
};

/// Full eigenvalue list of M (general dense solver) tested for inclusion in
/// `target` with slack `tol`. Throws EigenFailure on non-convergence.
SpectralReport eigen_check(const Mat& M, const SpectralTarget& target, double tol,
                           std::string tag = {});

/// Solves F J~ = D~ for the n x d matrix J~ whose columns are orthogonal
/// to 1. Requires every column of D~ to be orthogonal to 1 within
/// 1e-10 * sum|column|; throws IncompatibleRHS otherwise.
Mat constrained_flux_solve(const Mat& D_tilde, const Mat& F);

struct ConjugationBlocks {
  Mat top_left;   // equals -F0
  Vec top_right;  // equals c~'
};

/// Forms X^{-1} F X with X = I - e_n (1' - e_n)^T and returns its blocks.
/// Verifies the zero bottom row and the identities top_left = -F0,
/// top_right = c~'; throws BlockStructureViolation otherwise.
ConjugationBlocks conjugation_blocks(const Mat& F, const Vec& c_prime, double c_tot,
                                     const MixtureSpec& spec);

/// Measured deviations of X^{-1} F X from its predicted block form:
/// bottom row and top-right column relative to ||F||_inf, top-left
/// relative to ||F0||_inf.
struct ConjugationResiduals {
  double bottom_row = 0.0;
  double top_left = 0.0;
  double top_right = 0.0;
};
ConjugationResiduals conjugation_residuals(const Mat& F, const Vec& c_prime, double c_tot,
                                           const MixtureSpec& spec,
                                           ConjugationBlocks* blocks = nullptr);

/// The elimination matrix X and its inverse.
Mat elimination_matrix(int n);
Mat elimination_matrix_inverse(int n);

}  // namespace msdiff
