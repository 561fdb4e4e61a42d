#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "msdiff/ms_algebra.hpp"
#include "msdiff/verify_suites.hpp"
#include "test_support.hpp"

using namespace msdiff;
using msdiff::test::error_of;
using msdiff::test::mixture;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<double> sorted_real_eigenvalues(const Mat& M) {
  Eigen::EigenSolver<Mat> es(M, false);
  std::vector<double> out;
  for (Eigen::Index k = 0; k < M.rows(); ++k) {
    CHECK(std::abs(es.eigenvalues()(k).imag()) < 1e-12);
    out.push_back(es.eigenvalues()(k).real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

MixtureSpec three_species() { return mixture(3, {{0, 1, 2}, {0, 0, 4}, {0, 0, 0}}, 0.1, {1, 10, 0.5, 1.5}); }

}  // namespace

TEST_CASE("F for n = 2") {
  const MixtureSpec spec = mixture(2, {{0, 3}, {0, 0}});
  const Mat F = build_F(vec({1, 2}), spec);
  CHECK(F(0, 0) == -6.0);
  CHECK(F(0, 1) == 3.0);
  CHECK(F(1, 0) == 6.0);
  CHECK(F(1, 1) == -3.0);
  CHECK(error_of([&] { build_F(vec({1, 2, 3}), spec); }).first == ErrorKind::DimensionMismatch);
}

TEST_CASE("F for three equal species has spectrum {0, -3, -3}") {
  const MixtureSpec spec = mixture(3, {{0, 1, 1}, {0, 0, 1}, {0, 0, 0}});
  const auto ev = sorted_real_eigenvalues(build_F(vec({1, 1, 1}), spec));
  CHECK(ev[0] == doctest::Approx(-3.0));
  CHECK(ev[1] == doctest::Approx(-3.0));
  CHECK(ev[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("F0, its spectrum and the scaled concentration for a three-species state") {
  const MixtureSpec spec = three_species();
  const Vec cp = vec({1, 2});
  const Mat F0 = build_F0(cp, 6.0, spec);
  CHECK(F0(0, 0) == doctest::Approx(10.0));
  CHECK(F0(0, 1) == doctest::Approx(1.0));
  CHECK(F0(1, 0) == doctest::Approx(6.0));
  CHECK(F0(1, 1) == doctest::Approx(21.0));
  const auto ev = sorted_real_eigenvalues(F0);
  CHECK(ev[0] == doctest::Approx((31.0 - std::sqrt(145.0)) / 2.0));
  CHECK(ev[1] == doctest::Approx((31.0 + std::sqrt(145.0)) / 2.0));
  const Vec ct = scaled_concentration(cp, spec);
  CHECK(ct(0) == 2.0);
  CHECK(ct(1) == 8.0);

  const Mat B = invert_F0(F0);
  CHECK((B * F0 - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("scaled concentration uses k_in") {
  const MixtureSpec spec = mixture(3, {{0, 1, 5}, {0, 0, 7}, {0, 0, 0}});
  const Vec ct = scaled_concentration(vec({1, 2}), spec);
  CHECK(ct(0) == 5.0);
  CHECK(ct(1) == 14.0);
}

TEST_CASE("spectral bounds count ordered pairs") {
  const SpectralBounds sb = spectral_bounds(mixture(2, {{0, 3}, {0, 0}}, 0.1, {1, 2, 0.5, 1.5}));
  CHECK(sb.delta == 3.0);
  CHECK(sb.eta == 24.0);
}

TEST_CASE("invert_F0 reports singular matrices") {
  Mat S(2, 2);
  S << 1, 2, 2, 4;
  CHECK(error_of([&] { invert_F0(S); }).first == ErrorKind::NumericallySingular);
}

TEST_CASE("eigen_check inclusion, slack and zero handling") {
  Mat M = Mat::Zero(2, 2);
  M(0, 0) = 1.0;
  M(1, 1) = 2.0;
  const SpectralReport ok = eigen_check(M, {0.5, 3.0, false}, 0.0);
  CHECK(ok.pass);
  CHECK(ok.worst_margin == doctest::Approx(0.5));
  const SpectralReport bad = eigen_check(M, {1.5, 3.0, false}, 0.1);
  CHECK_FALSE(bad.pass);
  CHECK(bad.worst_margin == doctest::Approx(-0.5));
  M(0, 0) = 0.0;
  const SpectralReport zero = eigen_check(M, {1.5, 3.0, true}, 1e-12);
  CHECK(zero.pass);
  CHECK(zero.near_zero == 1);
}

TEST_CASE("constrained flux solve on span{1}^perp") {
  const MixtureSpec spec = mixture(2, {{0, 3}, {0, 0}});
  const Mat F = build_F(vec({1, 2}), spec);
  Mat D(2, 1);
  D << 9, -9;
  const Mat J = constrained_flux_solve(D, F);
  CHECK(J(0, 0) == doctest::Approx(-1.0));
  CHECK(J(1, 0) == doctest::Approx(1.0));

  D << 1, 1;
  CHECK(error_of([&] { constrained_flux_solve(D, F); }).first == ErrorKind::IncompatibleRHS);
}

TEST_CASE("constrained flux solve on random admissible samples") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (const auto& s : algebra_samples(11, 200)) {
    const int n = s.spec.n;
    const Mat F = build_F(s.c, s.spec);
    Mat D(n, 2);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < 2; ++a) D(i, a) = normal(rng);
    D.rowwise() -= D.colwise().mean();  // project onto span{1}^perp
    const Mat J = constrained_flux_solve(D, F);
    CHECK((F * J - D).cwiseAbs().maxCoeff() <= 1e-10 * D.cwiseAbs().maxCoeff());
    CHECK(J.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12 * J.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("kernel and image of F on random samples") {
  for (const auto& s : algebra_samples(3, 200)) {
    const Mat F = build_F(s.c, s.spec);
    const double scale = F.cwiseAbs().maxCoeff();
    CHECK(F.colwise().sum().cwiseAbs().maxCoeff() <= 1e-14 * scale);
    CHECK((F * s.c).cwiseAbs().maxCoeff() <= 1e-13 * scale * s.c.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("conjugation blocks for n = 2") {
  const MixtureSpec spec = mixture(2, {{0, 3}, {0, 0}});
  const Mat F = build_F(vec({1, 2}), spec);
  const ConjugationBlocks b = conjugation_blocks(F, vec({1}), 3.0, spec);
  CHECK(b.top_left(0, 0) == doctest::Approx(-9.0));
  CHECK(b.top_right(0) == doctest::Approx(3.0));
}

TEST_CASE("conjugation detects a mismatched F") {
  const MixtureSpec spec = three_species();
  Mat F = build_F(vec({1, 2, 3}), spec);
  CHECK_NOTHROW(conjugation_blocks(F, vec({1, 2}), 6.0, spec));
  F(0, 1) += 0.5;
  CHECK(error_of([&] { conjugation_blocks(F, vec({1, 2}), 6.0, spec); }).first ==
        ErrorKind::BlockStructureViolation);
}

TEST_CASE("elimination matrix and its inverse") {
  for (int n : {2, 3, 6}) {
    const Mat X = elimination_matrix(n);
    CHECK((X * elimination_matrix_inverse(n) - Mat::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("conjugation residuals on random samples") {
  for (const auto& s : algebra_samples(5, 200)) {
    const int n = s.spec.n;
    const ConjugationResiduals r =
        conjugation_residuals(build_F(s.c, s.spec), s.c.head(n - 1), s.c.sum(), s.spec);
    CHECK(r.bottom_row <= 1e-13);
    CHECK(r.top_left <= 1e-12);
    CHECK(r.top_right <= 1e-12);
  }
}

TEST_CASE("algebra samples are reproducible and admissible") {
  const auto a = algebra_samples(42, 50);
  const auto b = algebra_samples(42, 50);
  REQUIRE(a.size() == 50);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].c == b[k].c);
    CHECK(a[k].spec.K == b[k].spec.K);
    const double c_tot = a[k].c.sum();
    CHECK(c_tot >= a[k].spec.bounds.c_min * (1 - 1e-14));
    CHECK(c_tot <= a[k].spec.bounds.c_max * (1 + 1e-14));
    CHECK(a[k].c.minCoeff() >= 0.0);
  }
}
