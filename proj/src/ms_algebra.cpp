#include "msdiff/ms_algebra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "msdiff/errors.hpp"

namespace msdiff {

namespace {

double inf_norm(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

// Orthonormal basis of span{1}^perp: Helmert contrasts.
Mat helmert_basis(int n) {
  Mat Q = Mat::Zero(n, n - 1);
  for (int k = 1; k < n; ++k) {
    const double s = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int j = 0; j < k; ++j) Q(j, k - 1) = s;
    Q(k, k - 1) = -k * s;
  }
  return Q;
}

}  // namespace

Mat build_F(const Vec& c, const MixtureSpec& spec) {
  const int n = spec.n;
  if (c.size() != n)
    throw Error(ErrorKind::DimensionMismatch,
                "concentration vector has " + std::to_string(c.size()) + " entries, expected " +
                    std::to_string(n));
  Mat F(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      F(i, j) = spec.K(i, j) * c(i);
      diag += spec.K(i, j) * c(j);
    }
    F(i, i) = -diag;
  }
  return F;
}

Mat build_F0(const Vec& c_prime, double c_tot, const MixtureSpec& spec) {
  const int m = spec.n - 1;
  if (c_prime.size() != m)
    throw Error(ErrorKind::DimensionMismatch,
                "reduced vector has " + std::to_string(c_prime.size()) + " entries, expected " +
                    std::to_string(m));
  Mat F0(m, m);
  for (int i = 0; i < m; ++i) {
    const double k_in = spec.K(i, m);
    double diag = c_tot * k_in;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double dk = spec.K(i, j) - k_in;
      F0(i, j) = -dk * c_prime(i);
      diag += dk * c_prime(j);
    }
    F0(i, i) = diag;
  }
  return F0;
}

Mat invert_F0(const Mat& F0) {
  const int m = static_cast<int>(F0.rows());
  if (F0.cols() != m) throw Error(ErrorKind::DimensionMismatch, "F0 must be square");
  if (!F0.allFinite()) throw Error(ErrorKind::NumericallySingular, "F0 has non-finite entries");
  Eigen::PartialPivLU<Mat> lu(F0);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13))
    throw Error(ErrorKind::NumericallySingular,
                "F0 reciprocal condition " + std::to_string(rcond) + " (state outside admissible set?)");
  Mat B = lu.inverse();
  const double residual = inf_norm(F0 * B - Mat::Identity(m, m));
  if (!(residual <= 1e-12 / rcond))
    throw Error(ErrorKind::NumericallySingular,
                "inverse residual " + std::to_string(residual) + " too large");
  return B;
}

Vec scaled_concentration(const Vec& c_prime, const MixtureSpec& spec) {
  const int m = spec.n - 1;
  if (c_prime.size() != m) throw Error(ErrorKind::DimensionMismatch, "reduced vector size");
  Vec s(m);
  for (int i = 0; i < m; ++i) s(i) = spec.K(i, m) * c_prime(i);
  return s;
}

SpectralBounds spectral_bounds(const MixtureSpec& spec) {
  double k_min = std::numeric_limits<double>::infinity();
  double k_sum = 0.0;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j) {
      if (i == j) continue;
      k_min = std::min(k_min, spec.K(i, j));
      k_sum += spec.K(i, j);
    }
  return {spec.bounds.c_min * k_min, 2.0 * spec.bounds.c_max * k_sum};
}

SpectralReport eigen_check(const Mat& M, const SpectralTarget& target, double tol, std::string tag) {
  if (M.rows() != M.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
  if (!M.allFinite()) throw Error(ErrorKind::EigenFailure, "matrix has non-finite entries");
  Eigen::EigenSolver<Mat> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::EigenFailure, "eigensolver did not converge for " + tag);

  SpectralReport report;
  report.tag = std::move(tag);
  report.target = target;
  report.tol = tol;
  report.worst_margin = std::numeric_limits<double>::infinity();
  const auto& ev = solver.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const std::complex<double> lambda = ev(k);
    report.eigenvalues.push_back(lambda);
    double slack = std::min(lambda.real() - target.lo, target.hi - lambda.real()) -
                   std::abs(lambda.imag());
    if (target.include_zero) slack = std::max(slack, -std::abs(lambda));
    report.worst_margin = std::min(report.worst_margin, slack);
    if (std::abs(lambda) <= tol) ++report.near_zero;
  }
  report.pass = report.worst_margin >= -tol;
  return report;
}

Mat constrained_flux_solve(const Mat& D_tilde, const Mat& F) {
  const int n = static_cast<int>(F.rows());
  if (F.cols() != n || D_tilde.rows() != n)
    throw Error(ErrorKind::DimensionMismatch, "constrained_flux_solve: shape mismatch");
  for (Eigen::Index col = 0; col < D_tilde.cols(); ++col) {
    const double along_one = D_tilde.col(col).sum();
    const double tol_compat = 1e-10 * D_tilde.col(col).cwiseAbs().sum();
    if (std::abs(along_one) > tol_compat)
      throw Error(ErrorKind::IncompatibleRHS,
                  "column " + std::to_string(col) + " has component " + std::to_string(along_one) +
                      " along 1");
  }
  const Mat Q = helmert_basis(n);
  const Mat G = Q.transpose() * F * Q;
  Eigen::PartialPivLU<Mat> lu(G);
  if (!(lu.rcond() > 1e-13))
    throw Error(ErrorKind::NumericallySingular, "F restricted to span{1}^perp is singular");
  const Mat Y = lu.solve(Mat(Q.transpose() * D_tilde));
  return Q * Y;
}

Mat elimination_matrix(int n) {
  Mat X = Mat::Identity(n, n);
  for (int j = 0; j < n - 1; ++j) X(n - 1, j) = -1.0;
  return X;
}

Mat elimination_matrix_inverse(int n) {
  Mat X = Mat::Identity(n, n);
  for (int j = 0; j < n - 1; ++j) X(n - 1, j) = 1.0;
  return X;
}

ConjugationResiduals conjugation_residuals(const Mat& F, const Vec& c_prime, double c_tot,
                                           const MixtureSpec& spec, ConjugationBlocks* blocks) {
  const int n = spec.n;
  if (F.rows() != n || F.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "conjugation: F has wrong shape");
  const Mat P = elimination_matrix_inverse(n) * F * elimination_matrix(n);
  const double f_norm = inf_norm(F);
  const Mat F0 = build_F0(c_prime, c_tot, spec);
  const double f0_norm = inf_norm(F0);

  ConjugationResiduals res;
  const double bottom = P.row(n - 1).cwiseAbs().maxCoeff();
  const double tl = inf_norm(Mat(P.topLeftCorner(n - 1, n - 1) + F0));
  const double tr = (P.col(n - 1).head(n - 1) - scaled_concentration(c_prime, spec)).cwiseAbs().maxCoeff();
  res.bottom_row = f_norm > 0.0 ? bottom / f_norm : bottom;
  res.top_left = f0_norm > 0.0 ? tl / f0_norm : tl;
  res.top_right = f_norm > 0.0 ? tr / f_norm : tr;
  if (blocks) *blocks = ConjugationBlocks{P.topLeftCorner(n - 1, n - 1), P.col(n - 1).head(n - 1)};
  return res;
}

ConjugationBlocks conjugation_blocks(const Mat& F, const Vec& c_prime, double c_tot,
                                     const MixtureSpec& spec) {
  ConjugationBlocks blocks;
  const ConjugationResiduals res = conjugation_residuals(F, c_prime, c_tot, spec, &blocks);
  if (res.bottom_row > 1e-13)
    throw Error(ErrorKind::BlockStructureViolation,
                "bottom row is not zero (relative size " + std::to_string(res.bottom_row) + ")");
  if (res.top_left > 1e-12)
    throw Error(ErrorKind::BlockStructureViolation,
                "top-left block differs from -F0 (relative " + std::to_string(res.top_left) + ")");
  if (res.top_right > 1e-12)
    throw Error(ErrorKind::BlockStructureViolation,
                "top-right column differs from c~' (relative " + std::to_string(res.top_right) + ")");
  return blocks;
}

}  // namespace msdiff
