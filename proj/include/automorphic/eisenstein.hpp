#pragma once

// Real-analytic Eisenstein series through the Epstein dictionary, the Kronecker and
// Terras limit formulas, E_1^*, and the Dirichlet-Hecke identity at Heegner points.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "automorphic/epstein.hpp"
#include "automorphic/errors.hpp"
#include "automorphic/lattice.hpp"
#include "automorphic/specfun.hpp"

namespace automorphic {

struct EisensteinValue {
  Complex s;
  Complex value;
  double error_bound = 0.0;
};

/// Scattering coefficient c_s = xi(2s - 1) / xi(2s).
inline Complex c_scattering(Complex s) {
  const Complex a = 2.0 * s - 1.0, b = 2.0 * s;
  for (Complex p : {a, b})
    if (std::abs(p) < 1e-15 || std::abs(p - 1.0) < 1e-15) throw PoleError("c_scattering: pole input");
  return std::exp(log_xi(a) - log_xi(b));
}

namespace detail {

inline Complex zeta_of_double(Complex s) {
  const Complex z = riemann_zeta(2.0 * s);
  if (std::abs(z) < 1e-8) throw DomainError("eisenstein: zeta(2s) vanishes to working precision");
  return z;
}

}  // namespace detail

/// E_s(z) = Z_2(Q_z, s) / (2 zeta(2s)) with Q_z[(m, n)] = |m z + n|^2 / y.
inline EisensteinValue eisenstein_sl2(const UpperHalfPoint& z, Complex s, double tol = 1e-12) {
  if (std::abs(s - 0.5) < 1e-15) return {s, 0.0, 0.0};  // zeta(2s) has a pole, Z is finite
  const Complex denom = 2.0 * detail::zeta_of_double(s);
  const EvalResult zq = EpsteinEvaluator(gram_of_point(z)).zeta(s, tol);
  return {s, zq.value / denom, zq.error_bound / std::abs(denom)};
}

/// Degenerate Eisenstein series for the (r-1, 1) parabolic: Z_r(g g^T, r s / 2) / (2 zeta(r s)).
inline EisensteinValue eisenstein_slr(const GramMatrix& gram, Complex s, double tol = 1e-12) {
  if (std::abs(gram.determinant() - 1.0) > 1e-10) throw DomainError("eisenstein_slr: gram must have determinant 1");
  const double r = gram.dim();
  const Complex zeta_rs = riemann_zeta(r * s);
  if (std::abs(zeta_rs) < 1e-8) throw DomainError("eisenstein_slr: zeta(rs) vanishes to working precision");
  const EvalResult zq = EpsteinEvaluator(gram).zeta(0.5 * r * s, tol);
  return {s, zq.value / (2.0 * zeta_rs), zq.error_bound / std::abs(2.0 * zeta_rs)};
}

/// E_{1/2 + i tau}(z) from the Fourier expansion
///   y^s + c_s y^{1-s} + (4 sqrt(y) / xi(2s)) sum n^{s-1/2} sigma_{1-2s}(n) K_{s-1/2}(2 pi n y) cos(2 pi n x).
/// On this line the lattice route cancels catastrophically once tau grows, because the
/// completed sums are of size exp(pi tau / 2) while E_s is of moderate size.
inline EisensteinValue eisenstein_critical_line(const UpperHalfPoint& z0, double tau) {
  const Complex s(0.5, tau);
  if (tau == 0.0) return {s, 0.0, 0.0};
  const UpperHalfPoint z = reduce_sl2(z0).point;
  const double x = z.x(), y = z.y();
  const Complex log_y = std::log(y);
  const Complex constant = std::exp(s * log_y) + c_scattering(s) * std::exp((1.0 - s) * log_y);

  const std::vector<double> k_scaled = scaled_kbessel_imag_ladder(tau, 2.0 * kPi * y);
  const std::size_t n_max = k_scaled.size();
  // sigma_{-2 i tau}(n) by a divisor sieve.
  std::vector<Complex> sigma(n_max + 1, 0.0);
  for (std::size_t d = 1; d <= n_max; ++d) {
    const Complex dp = std::polar(1.0, -2.0 * tau * std::log(static_cast<double>(d)));
    for (std::size_t n = d; n <= n_max; n += d) sigma[n] += dp;
  }
  Complex series = 0.0;
  double magnitude = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double dn = static_cast<double>(n);
    const Complex term = std::polar(1.0, tau * std::log(dn)) * sigma[n] * k_scaled[n - 1] *
                         std::cos(2.0 * kPi * dn * x);
    series += term;
    magnitude += std::abs(term);
  }
  const Complex prefactor = 4.0 * std::sqrt(y) * std::exp(-0.5 * kPi * std::abs(tau) - log_xi(2.0 * s));
  const Complex value = constant + prefactor * series;
  // The inward RK4 ladder carries about 1e-7 relative error in each Bessel value.
  const double bound = 1e-15 * std::abs(constant) + 1e-6 * std::abs(prefactor) * magnitude;
  return {s, value, bound};
}

/// (6/pi)(gamma - log 2 - log(sqrt(y) |eta(z)|^2)).
inline double e1_star(const UpperHalfPoint& z) {
  const double log_abs_eta = std::log(std::abs(dedekind_eta(z.complex())));
  return 6.0 / kPi * (kEulerGamma - std::log(2.0) - 0.5 * std::log(z.y()) - 2.0 * log_abs_eta);
}

/// Kronecker's constant 2 pi (gamma - log 2 - log(sqrt(y) |eta(z)|^2)).
inline double kronecker_constant(const UpperHalfPoint& z) {
  const double log_abs_eta = std::log(std::abs(dedekind_eta(z.complex())));
  return 2.0 * kPi * (kEulerGamma - std::log(2.0) - 0.5 * std::log(z.y()) - 2.0 * log_abs_eta);
}

struct KroneckerCheck {
  double residue;      // a_{-1}
  double a0;           // a_0 from contour extraction
  double closed_form;  // kronecker_constant(z)
  double residual;     // |a0 - closed_form|
};

/// Compares the order-0 Laurent coefficient of Z_2(Q_z, s) at s = 1 with the closed form.
inline KroneckerCheck kronecker_limit_check(const UpperHalfPoint& z) {
  const LaurentExpansion lx = epstein_laurent(gram_of_point(z), Complex(1.0, 0.0), 1, 1e-12);
  const double a0 = lx.coefficient(0).real();
  const double closed = kronecker_constant(z);
  return {lx.coefficient(-1).real(), a0, closed, std::abs(a0 - closed)};
}

// ---------------------------------------------------------------------------
// Generalized limit formula
// ---------------------------------------------------------------------------

namespace detail {

// Nonzero integer vectors v with M[v] <= bound; M of any dimension >= 1.
template <class Visit>
void visit_form_vectors(const Matrix& m, double bound, Visit&& visit) {
  if (m.rows() == 1) {
    const double a = m(0, 0);
    const auto n_max = static_cast<std::int32_t>(std::floor(std::sqrt(bound / a)));
    for (std::int32_t n = -n_max; n <= n_max; ++n) {
      if (n == 0) continue;
      const std::array<std::int32_t, 1> v{n};
      visit(std::span<const std::int32_t>(v.data(), 1), a * n * n);
    }
    return;
  }
  for_each_vector(GramMatrix(m), bound, visit);
}

inline double form_minimum(const Matrix& m) {
  if (m.rows() == 1) return m(0, 0);
  double bound = m.diagonal().minCoeff();
  double best = bound;
  for_each_vector(GramMatrix(m), bound, [&](std::span<const std::int32_t>, double n) { best = std::min(best, n); });
  return best;
}

struct TerrasBlocks {
  Matrix a;  // l x l Schur complement
  Matrix d;  // k x k lower-right block
  Matrix x;  // k x l, D^{-1} Q21
};

inline TerrasBlocks terras_blocks(const Matrix& q, int ell) {
  const auto r = q.rows();
  const auto k = r - ell;
  const Matrix q11 = q.topLeftCorner(ell, ell);
  const Matrix q12 = q.topRightCorner(ell, k);
  const Matrix q21 = q.bottomLeftCorner(k, ell);
  const Matrix d = q.bottomRightCorner(k, k);
  const Matrix x = d.llt().solve(q21);
  return {q11 - q12 * x, d, x};
}

// Constant Laurent coefficient of Z_l(A, s) at s = l/2, any determinant.
inline double laurent_constant(const Matrix& a);

// Z_k(D, s) for s > k/2 (absolutely convergent region).
inline double form_zeta(const Matrix& d, double s) {
  if (d.rows() == 1) return 2.0 * std::pow(d(0, 0), -s) * riemann_zeta(Complex(2.0 * s, 0.0)).real();
  return EpsteinEvaluator(GramMatrix(d)).zeta(Complex(s, 0.0), 1e-14).value.real();
}

}  // namespace detail

/// The mixed Bessel sum
///   sum_{u != 0, m != 0} e^{2 pi i m.Xu} (D^{-1}[m] / A[u])^{l/4} K_{l/2}(2 pi sqrt(A[u] D^{-1}[m])) / sqrt(det D),
/// truncated where the Bessel argument exceeds 45. Returned complex so callers can
/// confirm that the imaginary part cancels.
inline Complex terras_bessel_sum(const GramMatrix& q, int ell) {
  const int r = q.dim();
  if (ell < 1 || ell >= r) throw DomainError("terras: need 1 <= ell < r");
  const auto blocks = detail::terras_blocks(q.matrix(), ell);
  const Matrix d_inv = blocks.d.inverse();
  const double nu = 0.5 * ell;
  const double w_max = 45.0;
  const double product_bound = std::pow(w_max / (2.0 * kPi), 2);
  const double min_dual = detail::form_minimum(d_inv);
  Complex total = 0.0;
  detail::visit_form_vectors(blocks.a, product_bound / min_dual, [&](std::span<const std::int32_t> u, double au) {
    Eigen::VectorXd uv(ell);
    for (int i = 0; i < ell; ++i) uv(i) = u[static_cast<std::size_t>(i)];
    const Eigen::VectorXd xu = blocks.x * uv;
    detail::visit_form_vectors(d_inv, product_bound / au, [&](std::span<const std::int32_t> m, double dm) {
      double phase = 0.0;
      for (int i = 0; i < r - ell; ++i) phase += m[static_cast<std::size_t>(i)] * xu(i);
      const double w = 2.0 * kPi * std::sqrt(au * dm);
      const double k = bessel_K(Complex(nu, 0.0), w).value.real();
      total += std::polar(std::pow(dm / au, 0.25 * ell) * k, 2.0 * kPi * phase);
    });
  });
  return total / std::sqrt(blocks.d.determinant());
}

/// Constant term of the Laurent expansion of Z_r(Q, s) at s = r/2, i.e. the limit of
/// Z_r(Q, s) - R / (s - r/2), assembled from the block decomposition with the first
/// `ell` coordinates split off. Equals twice the half-sum normalized constant Z*.
inline double terras_limit(const GramMatrix& q, int ell) {
  const int r = q.dim();
  if (ell < 1 || ell >= r) throw DomainError("terras: need 1 <= ell < r");
  const auto blocks = detail::terras_blocks(q.matrix(), ell);
  const double half_r = 0.5 * r;
  const double k = r - ell;
  const double det_d = blocks.d.determinant();
  const double gamma_r = std::tgamma(half_r);
  const double z_d = detail::form_zeta(blocks.d, half_r);
  const double recursion = std::pow(kPi, 0.5 * k) * std::tgamma(0.5 * ell) / (gamma_r * std::sqrt(det_d)) *
                           detail::laurent_constant(blocks.a);
  const double bessel = 2.0 * std::pow(kPi, half_r) / gamma_r * terras_bessel_sum(q, ell).real();
  const double digamma_part = std::pow(kPi, half_r) / (gamma_r * std::sqrt(q.determinant())) *
                              (digamma(Complex(0.5 * ell, 0.0)) - digamma(Complex(half_r, 0.0))).real();
  return z_d + recursion + bessel + digamma_part;
}

namespace detail {

inline double laurent_constant(const Matrix& a) {
  const auto l = a.rows();
  if (l == 1) {
    const double v = a(0, 0);
    return (2.0 * kEulerGamma - std::log(v)) / std::sqrt(v);
  }
  if (l == 2) {
    const double det = a.determinant();
    const double root = std::sqrt(det);
    const double t = a(1, 1) / root, qq = a(0, 1) / root;
    const UpperHalfPoint z(qq / t, 1.0 / t);
    return (kronecker_constant(z) - 0.5 * kPi * std::log(det)) / root;
  }
  return terras_limit(GramMatrix(a), 1);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Heegner points
// ---------------------------------------------------------------------------

/// Number of units w of the imaginary quadratic field of discriminant D.
inline int unit_count(std::int64_t disc) {
  if (disc == -3) return 6;
  if (disc == -4) return 4;
  return 2;
}

inline bool is_class_number_one(std::int64_t disc) {
  for (std::int64_t d : {-3, -4, -7, -8, -11, -19, -43, -67, -163})
    if (d == disc) return true;
  return false;
}

/// CM point of the principal form: i sqrt(|D|)/2 for even D, (-1 + i sqrt(|D|))/2 for odd D.
inline UpperHalfPoint heegner_point(std::int64_t disc) {
  if (!is_class_number_one(disc)) throw DomainError("heegner: unsupported discriminant");
  const double root = std::sqrt(static_cast<double>(-disc));
  if (disc % 2 == 0) return {0.0, 0.5 * root};
  return {-0.5, 0.5 * root};
}

/// Prefactor in E_s(tau_D) = (w/2) (sqrt|D|/2)^s zeta_K(s) / zeta(2s).
inline Complex heegner_factor(Complex s, std::int64_t disc) {
  const double root = std::sqrt(static_cast<double>(-disc));
  return 0.5 * unit_count(disc) * std::exp(s * std::log(0.5 * root));
}

/// zeta_K(s) recovered from E_s at the Heegner point of a class-number-one field.
inline Complex heegner_zeta(Complex s, std::int64_t disc) {
  const EisensteinValue e = eisenstein_sl2(heegner_point(disc), s);
  return e.value * riemann_zeta(2.0 * s) / heegner_factor(s, disc);
}

/// Dedekind zeta of Q(sqrt D) as zeta(s) L(s, chi_D).
inline Complex dedekind_zeta_quadratic(Complex s, std::int64_t disc) {
  return riemann_zeta(s) * dirichlet_L(s, disc);
}

}  // namespace automorphic
