#include <gtest/gtest.h>

#include <random>

#include "automorphic/epstein.hpp"
#include "support/oracles.hpp"

using namespace automorphic;

namespace {

GramMatrix det1(int r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return GramMatrix(oracle::random_det1_form(r, rng));
}

}  // namespace

TEST(EpsteinZeta, SumOfTwoSquaresAtTwo) {
  const Complex z = epstein_zeta(GramMatrix::identity(2), 2.0).value;
  // Box scan with the smooth tail, and the product 4 zeta(2) L(2, chi_-4) from raw series.
  const Complex brute = oracle::dirichlet_series_epstein(Matrix::Identity(2, 2), 2.0, 4.0e6);
  const Complex product = 4.0 * oracle::borwein_zeta(2.0) * oracle::dirichlet_series_L(2.0, -4, 2'500'000);
  EXPECT_NEAR(brute.real(), 6.026812, 1e-6);
  EXPECT_LT(std::abs(z - brute), 1e-8);
  EXPECT_LT(std::abs(z - product), 1e-10);
}

TEST(EpsteinZeta, Homogeneity) {
  const GramMatrix q = det1(2, 41);
  const Complex s(1.7, 0.4);
  const Complex scaled = epstein_zeta(q.scaled(4.0), s).value;
  const Complex base = epstein_zeta(q, s).value;
  EXPECT_LT(std::abs(scaled - std::pow(4.0, -s) * base), 1e-10);
}

TEST(EpsteinZeta, MatchesDirichletSeriesRightOfAbscissa) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const GramMatrix q = det1(2, seed);
    const Complex s(2.5, 1.0 * seed);
    const auto res = epstein_zeta(q, s, 1e-12);
    EXPECT_LT(std::abs(res.value - oracle::dirichlet_series_epstein(q.matrix(), s, 2e4)), 1e-9) << seed;
    EXPECT_LE(res.error_bound, 1e-10);
    EXPECT_GT(res.terms_used, 0);
  }
}

TEST(EpsteinZeta, ValueAtZeroIsMinusOne) {
  for (int r : {2, 3, 4}) EXPECT_LT(std::abs(epstein_zeta(det1(r, 7 + r), 0.0).value + 1.0), 1e-12) << r;
}

TEST(EpsteinZeta, PoleThrows) { EXPECT_THROW(epstein_zeta(GramMatrix::identity(2), 1.0), PoleError); }

TEST(FunctionalEquation, IdentityThreeDimensional) {
  // Lambda_I(s) recomputed with the roles of Q and Q^{-1} swapped at 3/2 - s.
  EXPECT_LT(check_functional_equation(GramMatrix::identity(3), Complex(0.4, -2.0)), 1e-10);
}

TEST(FunctionalEquation, RandomDetOneForm) {
  EXPECT_LT(check_functional_equation(det1(2, 99), Complex(1.3, 2.0)), 1e-10);
}

TEST(FunctionalEquation, SymmetricCentre) {
  const GramMatrix q = GramMatrix::identity(2);
  EXPECT_LT(check_functional_equation(q, 0.5), 1e-12);
}

TEST(FunctionalEquation, FourSquaresClosedForm) {
  auto closed = [](Complex s) {
    return 8.0 * (1.0 - std::pow(4.0, 1.0 - s)) * oracle::borwein_zeta(s) * oracle::borwein_zeta(s - 1.0);
  };
  const GramMatrix q = GramMatrix::identity(4);
  // The Jacobi form itself is brute-force checked where the series converges.
  EXPECT_LT(std::abs(closed(3.0) - oracle::dirichlet_series_epstein(Matrix::Identity(4, 4), 3.0, 400.0)) /
                std::abs(closed(3.0)),
            1e-3);
  EXPECT_LT(std::abs(epstein_zeta(q, 3.0).value - closed(3.0)) / std::abs(closed(3.0)), 1e-9);
  EXPECT_LT(std::abs(epstein_zeta(q, 2.5).value - closed(2.5)) / std::abs(closed(2.5)), 1e-9);
}

TEST(EpsteinResidue, PlaneIsPi) { EXPECT_NEAR(epstein_residue(det1(2, 5)), kPi, 1e-8); }

TEST(EpsteinResidue, ThreeDimensionalIsTwoPi) {
  EXPECT_NEAR(epstein_residue(GramMatrix::identity(3)), 2.0 * kPi, 1e-8);
  EXPECT_NEAR(epstein_residue_closed_form(3), 2.0 * kPi, 1e-14);
}

TEST(EpsteinResidue, IndependentOfForm) {
  EXPECT_LT(std::abs(epstein_residue(det1(3, 8)) - epstein_residue(det1(3, 9))), 1e-8);
}

TEST(EpsteinResidue, RequiresDetOne) {
  EXPECT_THROW(epstein_residue(GramMatrix::identity(2).scaled(2.0)), DomainError);
}

TEST(EpsteinLaurent, AnalyticPointHasNoPole) {
  const auto lx = epstein_laurent(GramMatrix::identity(2), 2.0, 3);
  EXPECT_LT(std::abs(lx.coefficient(-1)), 1e-10);
  EXPECT_LT(std::abs(lx.coefficient(0) - epstein_zeta(GramMatrix::identity(2), 2.0).value), 1e-10);
}

TEST(EpsteinLaurent, PoleMatchesResidue) {
  const GramMatrix q = det1(2, 12);
  const auto lx = epstein_laurent(q, 1.0, 2);
  EXPECT_NEAR(lx.coefficient(-1).real(), epstein_residue(q), 1e-12);
}

TEST(EpsteinLaurent, ReconstructionInsideContour) {
  const GramMatrix q = det1(3, 13);
  const auto lx = epstein_laurent(q, 1.5, 12);
  for (double angle : {0.3, 1.9, 4.0}) {
    const Complex s = 1.5 + 0.05 * std::polar(1.0, angle);
    EXPECT_LT(std::abs(lx.evaluate(s) - epstein_zeta(q, s).value), 1e-9) << angle;
  }
}

TEST(EpsteinLaurent, StableUnderNodeDoubling) {
  const EpsteinEvaluator ev(det1(2, 77));
  auto f = [&](Complex s) { return ev.zeta(s, 1e-13).value; };
  const auto a = cauchy_laurent(f, 1.0, 4, 0.1, 1e-12, 64, 128);
  const auto b = cauchy_laurent(f, 1.0, 4, 0.1, 1e-12, 128, 256);
  for (int k = -1; k <= 4; ++k) EXPECT_LT(std::abs(a.coefficient(k) - b.coefficient(k)), 1e-9) << k;
}
