#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <random>
#include <vector>

#include "automorphic/lattice.hpp"
#include "support/oracles.hpp"

using namespace automorphic;

namespace {

GramMatrix random_spd(int r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = u(rng);
  Matrix q = a.transpose() * a + Matrix::Identity(r, r);
  return GramMatrix(0.5 * (q + q.transpose()));
}

using Coords = std::vector<long>;

std::vector<Coords> as_sorted(const std::vector<LatticeVector>& vs, int r) {
  std::vector<Coords> out;
  for (const auto& v : vs) out.emplace_back(v.coords.begin(), v.coords.begin() + r);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Cholesky, IdentityIsFixed) {
  EXPECT_TRUE(cholesky(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3), 1e-15));
}

TEST(Cholesky, Diagonal) {
  Matrix q(2, 2);
  q << 4, 0, 0, 9;
  const Matrix l = cholesky(q);
  EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(l(1, 1), 3.0);
  EXPECT_DOUBLE_EQ(l(1, 0), 0.0);
}

TEST(Cholesky, RandomReconstruction) {
  std::mt19937_64 rng(11);
  for (int r = 2; r <= 6; ++r) {
    const GramMatrix q = random_spd(r, rng);
    const Matrix l = cholesky(q.matrix());
    EXPECT_LT((l * l.transpose() - q.matrix()).norm(), 1e-12 * q.matrix().norm()) << r;
  }
}

TEST(Cholesky, IndefiniteThrows) {
  Matrix q(2, 2);
  q << 1, 2, 2, 1;
  EXPECT_THROW(cholesky(q), DomainError);
  EXPECT_THROW(GramMatrix{q}, DomainError);
}

TEST(GramMatrixType, RejectsBadShapes) {
  EXPECT_THROW(GramMatrix(Matrix::Identity(1, 1)), DomainError);
  EXPECT_THROW(GramMatrix(Matrix::Identity(7, 7)), DomainError);
  Matrix asym(2, 2);
  asym << 2, 0.1, 0.0, 2;
  EXPECT_THROW(GramMatrix{asym}, DomainError);
  const std::array<double, 3> short_list{1, 0, 1};
  EXPECT_THROW(GramMatrix::from_row_major(2, short_list), DomainError);
}

TEST(GramMatrixType, ValueIsQuadraticForm) {
  const std::array<double, 4> e{2, 1, 1, 3};
  const auto q = GramMatrix::from_row_major(2, e);
  const std::array<int, 2> v{1, -2};
  EXPECT_DOUBLE_EQ(q.value(std::span<const int>(v)), 2 - 4 + 12);
}

TEST(NormalizeDet, ScaledIdentity) {
  const auto [q, c] = normalize_det(GramMatrix(4.0 * Matrix::Identity(2, 2)));
  EXPECT_NEAR(c, 4.0, 1e-14);
  EXPECT_TRUE(q.matrix().isApprox(Matrix::Identity(2, 2), 1e-14));
}

TEST(NormalizeDet, DetOneUnchanged) {
  std::mt19937_64 rng(3);
  const GramMatrix q(oracle::random_det1_form(3, rng));
  const auto [qn, c] = normalize_det(q);
  EXPECT_NEAR(c, 1.0, 1e-12);
  EXPECT_LT((qn.matrix() - q.matrix()).norm(), 1e-12);
}

TEST(NormalizeDet, RandomFormsReachDetOne) {
  std::mt19937_64 rng(5);
  for (int r = 2; r <= 5; ++r) {
    const auto [qn, c] = normalize_det(random_spd(r, rng));
    EXPECT_LT(std::abs(qn.matrix().determinant() - 1.0), 1e-12) << r;
    EXPECT_GT(c, 0.0);
  }
}

TEST(EnumerateVectors, UnitCircle) {
  const auto vs = enumerate_vectors(GramMatrix::identity(2), 1.0);
  EXPECT_EQ(vs.size(), 4u);
  for (const auto& v : vs) EXPECT_DOUBLE_EQ(v.norm, 1.0);
}

TEST(EnumerateVectors, RadiusTwo) { EXPECT_EQ(enumerate_vectors(GramMatrix::identity(2), 2.0).size(), 8u); }

TEST(EnumerateVectors, MatchesBoxScan) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    const GramMatrix q = random_spd(3, rng);
    const auto got = as_sorted(enumerate_vectors(q, 20.0), 3);
    std::vector<Coords> want;
    oracle::box_scan(q.matrix(), 20.0, [&](const std::vector<long>& v, double) { want.push_back(v); });
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want);
    for (const auto& c : got) EXPECT_LE(*std::max_element(c.begin(), c.end()), 40);
  }
}

TEST(EnumerateVectors, OrderedByNorm) {
  std::mt19937_64 rng(23);
  const auto vs = enumerate_vectors(random_spd(4, rng), 10.0);
  for (std::size_t i = 1; i < vs.size(); ++i) EXPECT_LE(vs[i - 1].norm, vs[i].norm);
}

TEST(EnumerateVectors, CapIsEnforced) {
  EXPECT_THROW(enumerate_vectors(GramMatrix::identity(2), 1e4, 100), CapExceeded);
  EXPECT_THROW(enumerate_vectors(GramMatrix::identity(2), 0.0), DomainError);
}

TEST(ReduceSl2, IIsFixed) {
  const auto red = reduce_sl2(UpperHalfPoint(0.0, 1.0));
  EXPECT_NEAR(red.point.x(), 0.0, 1e-15);
  EXPECT_NEAR(red.point.y(), 1.0, 1e-15);
  EXPECT_EQ(red.gamma, (Sl2Z{1, 0, 0, 1}));
}

TEST(ReduceSl2, ReducedPointUnchanged) {
  const auto red = reduce_sl2(UpperHalfPoint(0.3, 1.4));
  EXPECT_NEAR(red.point.x(), 0.3, 1e-15);
  EXPECT_NEAR(red.point.y(), 1.4, 1e-15);
}

TEST(ReduceSl2, DeepPoint) {
  const UpperHalfPoint z(0.4, 0.01);
  const auto red = reduce_sl2(z);
  EXPECT_GE(red.point.y(), std::sqrt(3.0) / 2.0 - 1e-9);
  EXPECT_LE(std::abs(red.point.x()), 0.5 + 1e-12);
  EXPECT_GE(std::abs(red.point.complex()), 1.0 - 1e-12);
  EXPECT_EQ(red.gamma.det(), 1);
  EXPECT_LT(std::abs(red.gamma.apply(z.complex()) - red.point.complex()), 1e-12);
}

TEST(ReduceSl2, BoundaryTiePrefersLeft) {
  const auto red = reduce_sl2(UpperHalfPoint(0.3, std::sqrt(0.91)));  // on |z| = 1
  EXPECT_LE(red.point.x(), 1e-12);
  EXPECT_NEAR(std::abs(red.point.complex()), 1.0, 1e-12);
}

TEST(UpperHalfPointType, RejectsLowerHalfPlane) {
  EXPECT_THROW(UpperHalfPoint(0.0, 0.0), DomainError);
  EXPECT_THROW(UpperHalfPoint(0.0, -1.0), DomainError);
}

TEST(GramOfPoint, IIsIdentity) {
  EXPECT_TRUE(gram_of_point(UpperHalfPoint(0.0, 1.0)).matrix().isApprox(Matrix::Identity(2, 2), 1e-15));
}

TEST(GramOfPoint, DeterminantOne) {
  EXPECT_NEAR(gram_of_point(UpperHalfPoint(0.3, 0.7)).determinant(), 1.0, 1e-12);
}

TEST(GramOfPoint, ValueAtOneOne) {
  const auto q = gram_of_point(UpperHalfPoint(0.5, 2.0));
  const std::array<int, 2> v{1, 1};
  EXPECT_NEAR(q.value(std::span<const int>(v)), 3.125, 1e-14);
}

TEST(GramOfPoint, MatchesLatticeNorms) {
  const std::complex<double> z(-0.27, 0.83);
  const auto q = gram_of_point(UpperHalfPoint(z));
  for (int m = -5; m <= 5; ++m)
    for (int n = -5; n <= 5; ++n) {
      const std::array<int, 2> v{m, n};
      EXPECT_NEAR(q.value(std::span<const int>(v)), std::norm(static_cast<double>(m) * z + static_cast<double>(n)) / z.imag(),
                  1e-12);
    }
}
