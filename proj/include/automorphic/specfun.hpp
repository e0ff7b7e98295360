#pragma once

// Complex special functions: Gamma and its incomplete and logarithmic forms,
// Riemann/Hurwitz zeta, completed zeta, Dirichlet L-functions of quadratic
// characters, K-Bessel functions, Dedekind eta, and the phase of xi on Re s = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "automorphic/errors.hpp"
#include "automorphic/quadrature.hpp"

namespace automorphic {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;
inline constexpr Complex kI{0.0, 1.0};

/// Value with an estimated absolute error.
struct Estimate {
  Complex value;
  double error_bound = 0.0;
};

namespace detail {

// B_2, B_4, ..., B_50.
inline constexpr std::array<double, 25> kBernoulliEven = {
    1.0 / 6,
    -1.0 / 30,
    1.0 / 42,
    -1.0 / 30,
    5.0 / 66,
    -691.0 / 2730,
    7.0 / 6,
    -3617.0 / 510,
    43867.0 / 798,
    -174611.0 / 330,
    854513.0 / 138,
    -236364091.0 / 2730,
    8553103.0 / 6,
    -23749461029.0 / 870,
    8615841276005.0 / 14322,
    -7709321041217.0 / 510,
    2577687858367.0 / 6,
    -26315271553053477373.0 / 1919190,
    2929993913841559.0 / 6,
    -261082718496449122051.0 / 13530,
    1520097643918070802691.0 / 1806,
    -27833269579301024235023.0 / 690,
    596451111593912163277961.0 / 282,
    -5609403368997817686249127547.0 / 46410,
    495057205241079648212477525.0 / 66,
};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline bool is_nonpositive_integer(Complex s, double eps = 0.0) {
  if (std::abs(s.imag()) > eps) return false;
  if (s.real() > eps) return false;
  return std::abs(s.real() - std::round(s.real())) <= eps;
}

// Shift count bringing Re(z + n) to at least `target`.
inline int shift_to(Complex z, double target) {
  return z.real() >= target ? 0 : static_cast<int>(std::ceil(target - z.real()));
}

// (exp(u) - 1) / u for complex u.
inline Complex expm1_over(Complex u) {
  if (std::abs(u) < 1e-4) return 1.0 + u * (0.5 + u * (1.0 / 6.0 + u / 24.0));
  return (std::exp(u) - 1.0) / u;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gamma family
// ---------------------------------------------------------------------------

/// log Gamma(s) on the branch analytic off the non-positive real axis
/// (agrees with the real logarithm for s > 0).
inline Complex log_gamma(Complex s) {
  if (detail::is_nonpositive_integer(s)) throw PoleError("log_gamma: pole at non-positive integer");
  const int n = detail::shift_to(s, 15.0);
  Complex shift_sum = 0.0;
  for (int k = 0; k < n; ++k) shift_sum += std::log(s + static_cast<double>(k));
  const Complex z = s + static_cast<double>(n);
  const Complex zinv = 1.0 / z;
  const Complex zinv2 = zinv * zinv;
  Complex series = 0.0;
  Complex pw = zinv;
  for (int k = 1; k <= 14; ++k) {
    series += detail::kBernoulliEven[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw;
    pw *= zinv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift_sum;
}

inline Complex gamma(Complex s) { return std::exp(log_gamma(s)); }

/// Gamma'(s)/Gamma(s).
inline Complex digamma(Complex s) {
  if (detail::is_nonpositive_integer(s)) throw PoleError("digamma: pole at non-positive integer");
  const int n = detail::shift_to(s, 15.0);
  Complex shift_sum = 0.0;
  for (int k = 0; k < n; ++k) shift_sum += 1.0 / (s + static_cast<double>(k));
  const Complex z = s + static_cast<double>(n);
  const Complex zinv2 = 1.0 / (z * z);
  Complex series = 0.0;
  Complex pw = zinv2;
  for (int k = 1; k <= 14; ++k) {
    series += detail::kBernoulliEven[k - 1] / (2.0 * k) * pw;
    pw *= zinv2;
  }
  return std::log(z) - 0.5 / z - series - shift_sum;
}

/// Lower incomplete gamma by its power series; valid for any s off the poles.
inline Estimate lower_incomplete_gamma_series(Complex s, double x) {
  if (!(x > 0.0)) throw DomainError("lower_incomplete_gamma_series: x must be positive");
  if (detail::is_nonpositive_integer(s)) throw PoleError("lower_incomplete_gamma_series: pole");
  Complex term = 1.0 / s;
  Complex sum = term;
  int k = 1;
  for (; k < 100000; ++k) {
    term *= x / (s + static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && std::abs(s + static_cast<double>(k)) > 2.0 * x) break;
  }
  const Complex prefactor = std::exp(s * std::log(x) - x);
  return {prefactor * sum, std::abs(prefactor) * (std::abs(term) * 2.0 + 1e-16 * std::abs(sum))};
}

namespace detail {

// Legendre continued fraction for Gamma(s, x), modified Lentz.
inline bool incomplete_gamma_cf(Complex s, double x, Estimate& out, int max_iter = 4000) {
  constexpr double tiny = 1e-300;
  Complex b = x + 1.0 - s;
  Complex c = 1.0 / tiny;
  Complex d = 1.0 / b;
  Complex h = d;
  for (int i = 1; i <= max_iter; ++i) {
    const Complex an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const Complex delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      const Complex prefactor = std::exp(s * std::log(x) - x);
      out.value = prefactor * h;
      out.error_bound = 4e-16 * std::abs(out.value) * std::sqrt(static_cast<double>(i));
      return is_finite(out.value);
    }
  }
  return false;
}

// Gamma(s, x) = x^s * int_0^inf exp(s v - x e^v) dv, composite Gauss-Legendre.
inline Estimate incomplete_gamma_quadrature(Complex s, double x) {
  const double sigma = s.real();
  // exp(sigma v - x e^v) below 1e-20 of its peak once x e^v exceeds this.
  const double upper_u = std::max({60.0, 4.0 * std::abs(sigma) + 60.0, 1.5 * x + 60.0});
  const double vmax = std::max(1.0, std::log(upper_u / x));
  const double width = std::min(0.25, 0.5 / (1.0 + std::abs(s.imag()) / 8.0));
  auto f = [&](double v) { return std::exp(s * v - x * std::exp(v)); };
  const Complex coarse = quad::integrate(f, 0.0, vmax, width * 2.0);
  const Complex fine = quad::integrate(f, 0.0, vmax, width);
  const Complex prefactor = std::exp(s * std::log(x));
  return {prefactor * fine, std::abs(prefactor) * (std::abs(fine - coarse) + 1e-16 * std::abs(fine))};
}

}  // namespace detail

/// Upper incomplete gamma Gamma(s, x) for complex s and x > 0 (entire in s).
inline Estimate upper_incomplete_gamma(Complex s, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("upper_incomplete_gamma: x must be positive");
  Estimate out;
  if (x >= 1.0 && detail::incomplete_gamma_cf(s, x, out)) return out;
  const bool near_pole = s.real() < 0.5 && std::abs(s.imag()) < 0.3 &&
                         std::abs(s.real() - std::round(s.real())) < 0.3;
  if (!near_pole && x < 1.0) {
    const Estimate lower = lower_incomplete_gamma_series(s, x);
    const Complex g = gamma(s);
    return {g - lower.value, lower.error_bound + 1e-16 * std::abs(g) * 4.0};
  }
  return detail::incomplete_gamma_quadrature(s, x);
}

// ---------------------------------------------------------------------------
// Zeta family
// ---------------------------------------------------------------------------

namespace detail {

// Euler-Maclaurin tail of sum_{n>=0} w(n + alpha)^{-s} beyond the first `n_terms`
// terms, without the pole term. Returns the correction and an error bound.
struct EmTail {
  Complex value;
  double error;
};

inline EmTail euler_maclaurin_tail(Complex s, double big_x, int corrections) {
  // big_x = N + alpha.
  const Complex log_x = std::log(Complex(big_x, 0.0));
  const Complex x_pow = std::exp(-s * log_x);  // X^{-s}
  Complex sum = 0.5 * x_pow;
  Complex rising = s;                          // (s)_{2k-1}
  Complex xp = x_pow / big_x;                  // X^{-s-1}
  double factorial = 2.0;                      // (2k)!
  const double inv_x2 = 1.0 / (big_x * big_x);
  Complex last = 0.0;
  for (int k = 1; k <= corrections; ++k) {
    last = kBernoulliEven[k - 1] / factorial * rising * xp;
    sum += last;
    rising *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
    xp *= inv_x2;
    factorial *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
  }
  const Complex next = kBernoulliEven[corrections] / factorial * rising * xp;
  const double sigma_shift = s.real() + 2.0 * corrections + 1.0;
  const double factor = sigma_shift > 0.0 ? std::abs(s + (2.0 * corrections + 1.0)) / sigma_shift : 1e3;
  return {sum, std::abs(next) * factor + 1e-16 * std::abs(sum)};
}

inline int em_terms(Complex s) {
  return std::max(50, static_cast<int>(std::ceil(std::abs(s))) + 10);
}

inline constexpr int kEmCorrections = 20;

}  // namespace detail

/// Hurwitz zeta(s, alpha) for alpha in (0, 1], s != 1.
inline Estimate hurwitz_zeta(Complex s, double alpha) {
  if (s == Complex(1.0, 0.0)) throw PoleError("hurwitz_zeta: pole at s = 1");
  if (!(alpha > 0.0)) throw DomainError("hurwitz_zeta: alpha must be positive");
  const int n = detail::em_terms(s);
  Complex head = 0.0;
  for (int k = 0; k < n; ++k) head += std::exp(-s * std::log(k + alpha));
  const double big_x = n + alpha;
  const auto tail = detail::euler_maclaurin_tail(s, big_x, detail::kEmCorrections);
  const Complex pole = std::exp((1.0 - s) * std::log(big_x)) / (s - 1.0);
  const Complex value = head + pole + tail.value;
  return {value, tail.error + 1e-16 * n * std::max(1.0, std::abs(head))};
}

/// Riemann zeta with an error estimate; pole at s = 1.
inline Estimate riemann_zeta_estimate(Complex s) {
  if (s == Complex(1.0, 0.0)) throw PoleError("riemann_zeta: pole at s = 1");
  if (s.real() < -1.0) {
    // zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
    const Estimate reflected = hurwitz_zeta(1.0 - s, 1.0);
    const Complex factor = std::exp(s * std::log(2.0) + (s - 1.0) * std::log(kPi) + log_gamma(1.0 - s)) *
                           std::sin(0.5 * kPi * s);
    return {factor * reflected.value, std::abs(factor) * reflected.error_bound + 1e-15 * std::abs(factor * reflected.value)};
  }
  return hurwitz_zeta(s, 1.0);
}

inline Complex riemann_zeta(Complex s) { return riemann_zeta_estimate(s).value; }

/// log xi(s) for xi(s) = pi^{-s/2} Gamma(s/2) zeta(s); uses xi(s) = xi(1-s) for Re s < 1/2.
/// The imaginary part is only defined modulo 2 pi.
inline Complex log_xi(Complex s) {
  if (s == Complex(0.0, 0.0) || s == Complex(1.0, 0.0)) throw PoleError("xi: pole at s = 0 or s = 1");
  if (s.real() < 0.5) s = 1.0 - s;
  return -0.5 * s * std::log(kPi) + log_gamma(0.5 * s) + std::log(riemann_zeta(s));
}

/// Completed zeta xi(s) = pi^{-s/2} Gamma(s/2) zeta(s).
inline Complex xi_completed(Complex s) { return std::exp(log_xi(s)); }

// ---------------------------------------------------------------------------
// Quadratic characters and Dirichlet L-functions
// ---------------------------------------------------------------------------

/// Kronecker symbol (d / n) for n >= 1.
inline int kronecker_symbol(std::int64_t d, std::int64_t n) {
  if (n <= 0) throw DomainError("kronecker_symbol: n must be positive");
  int result = 1;
  while (n % 2 == 0) {
    n /= 2;
    if (d % 2 == 0) return 0;
    const std::int64_t m8 = ((d % 8) + 8) % 8;
    if (m8 == 3 || m8 == 5) result = -result;
  }
  // Jacobi symbol (d / n), n odd.
  std::int64_t a = ((d % n) + n) % n;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const std::int64_t r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

inline bool is_fundamental_discriminant(std::int64_t d) {
  if (d == 0 || d == 1) return false;
  auto squarefree = [](std::int64_t m) {
    m = m < 0 ? -m : m;
    for (std::int64_t p = 2; p * p <= m; ++p)
      if (m % (p * p) == 0) return false;
    return true;
  };
  const std::int64_t m4 = ((d % 4) + 4) % 4;
  if (m4 == 1) return squarefree(d);
  if (m4 != 0) return false;
  const std::int64_t m = d / 4;
  const std::int64_t mm4 = ((m % 4) + 4) % 4;
  return (mm4 == 2 || mm4 == 3) && squarefree(m);
}

/// L(s, chi_D) for a fundamental discriminant D (entire for D != 1).
inline Estimate dirichlet_L_estimate(Complex s, std::int64_t discriminant) {
  if (!is_fundamental_discriminant(discriminant))
    throw DomainError("dirichlet_L: " + std::to_string(discriminant) + " is not a fundamental discriminant");
  const std::int64_t q = discriminant < 0 ? -discriminant : discriminant;
  const int n = detail::em_terms(s);
  Complex total = 0.0;
  double error = 0.0;
  for (std::int64_t a = 1; a <= q; ++a) {
    const int chi = kronecker_symbol(discriminant, a);
    if (chi == 0) continue;
    const double alpha = static_cast<double>(a) / static_cast<double>(q);
    Complex head = 0.0;
    for (int k = 0; k < n; ++k) head += std::exp(-s * std::log(k + alpha));
    const double big_x = n + alpha;
    const auto tail = detail::euler_maclaurin_tail(s, big_x, detail::kEmCorrections);
    // (X^{1-s} - 1)/(s - 1); the -1/(s-1) pieces cancel because sum chi = 0.
    const Complex u = (1.0 - s) * std::log(big_x);
    const Complex pole = -std::log(big_x) * detail::expm1_over(u);
    total += static_cast<double>(chi) * (head + pole + tail.value);
    error += tail.error;
  }
  const Complex scale = std::exp(-s * std::log(static_cast<double>(q)));
  return {scale * total, std::abs(scale) * (error + 1e-15 * std::abs(total))};
}

inline Complex dirichlet_L(Complex s, std::int64_t discriminant) {
  return dirichlet_L_estimate(s, discriminant).value;
}

// ---------------------------------------------------------------------------
// K-Bessel
// ---------------------------------------------------------------------------

/// K_nu(z) = (1/2) int_{-inf}^{inf} exp(-z cosh v + nu v) dv for z > 0, by the
/// trapezoidal rule (spectrally accurate for this analytic integrand); step halved
/// until two successive values agree.
inline Estimate bessel_K(Complex nu, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("bessel_K: z must be positive");
  // exp(-z cosh v + |Re nu| v) is below 1e-18 of exp(-z) beyond vmax.
  const double a = std::abs(nu.real());
  double vmax = 1.0;
  while (-z * (std::cosh(vmax) - 1.0) + a * vmax > -45.0) vmax += 0.25;
  auto integrand = [&](double v) {
    return std::exp(-z * std::cosh(v) + z) * std::cosh(nu * v);  // scaled by e^{z}
  };
  double h = std::min(0.25, 1.0 / (1.0 + std::abs(nu.imag())));
  double magnitude = 0.0;  // trapezoid sum of |integrand|, the cancellation scale
  auto trapezoid = [&](double step) {
    Complex sum = 0.5 * integrand(0.0);
    magnitude = 0.5 * std::abs(sum);
    for (double v = step; v <= vmax; v += step) {
      const Complex f = integrand(v);
      sum += f;
      magnitude += std::abs(f);
    }
    magnitude *= step;
    return sum * step;  // half-line, integrand even
  };
  Complex prev = trapezoid(h);
  for (int it = 0; it < 12; ++it) {
    h *= 0.5;
    const Complex cur = trapezoid(h);
    const double diff = std::abs(cur - prev);
    if (diff <= 1e-14 * magnitude || diff < 1e-300) {
      const double scale = std::exp(-z);
      return {cur * scale, (diff + 1e-16 * magnitude) * scale};
    }
    prev = cur;
  }
  throw ConvergenceError("bessel_K: trapezoidal rule did not converge");
}

namespace detail {

// e^{pi tau/2} K_{i tau}(x) and its x-derivative at x beyond the turning point
// (x > tau), from the contour shifted through the saddle at i*arcsin(tau/x).
inline std::array<double, 2> scaled_kbessel_imag_contour(double tau, double x) {
  const double theta = std::asin(std::min(1.0, tau / x));
  const double ct = std::cos(theta);
  const Complex shift(0.0, theta);
  auto g = [&](double v) {
    const Complex w = Complex(v, 0.0) + shift;
    return std::exp(-x * std::cosh(w) + kI * tau * w + 0.5 * kPi * tau);
  };
  double vmax = 0.5;
  while (x * ct * (std::cosh(vmax) - 1.0) < 46.0) vmax += 0.05;
  const double freq = tau * (std::cosh(vmax) - 1.0) + 1.0;
  double h = std::min(0.02, 0.5 / freq);
  auto trapezoid = [&](double step) {
    Complex k = 0.5 * g(0.0);
    Complex dk = -0.5 * std::cosh(shift) * g(0.0);
    for (double v = step; v <= vmax; v += step) {
      const Complex gv = g(v);
      k += gv;
      dk -= std::cosh(Complex(v, 0.0) + shift) * gv;
    }
    return std::array<double, 2>{(k * step).real(), (dk * step).real()};
  };
  auto prev = trapezoid(h);
  for (int it = 0; it < 10; ++it) {
    h *= 0.5;
    auto cur = trapezoid(h);
    const double scale = std::abs(cur[0]) + std::abs(cur[1]) + 1e-300;
    if (std::abs(cur[0] - prev[0]) + std::abs(cur[1] - prev[1]) < 1e-13 * scale) return cur;
    prev = cur;
  }
  throw ConvergenceError("scaled K_{i tau}: contour integral did not converge");
}

}  // namespace detail

/// e^{pi tau / 2} K_{i tau}(n * x_step) for n = 1, 2, ..., stopping once the
/// values have decayed below 1e-17 of the oscillatory envelope. The modified
/// Bessel equation is integrated inward (the stable direction for K) from a
/// starting point beyond the turning point, seeded by a saddle-point contour.
inline std::vector<double> scaled_kbessel_imag_ladder(double tau, double x_step) {
  if (!(x_step > 0.0)) throw DomainError("scaled_kbessel_imag_ladder: x_step must be positive");
  tau = std::abs(tau);
  // F(x) = sqrt(x^2 - tau^2) - tau * arccos(tau/x) is the decay exponent past x = tau.
  auto decay = [&](double x) {
    if (x <= tau) return 0.0;
    return std::sqrt(x * x - tau * tau) - tau * std::acos(tau / x);
  };
  double x_max = std::max(tau, x_step) + 1.0;
  while (decay(x_max) < 40.0) x_max += 1.0;
  const int count = static_cast<int>(std::floor(x_max / x_step));
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)), 0.0);
  if (count <= 0) return out;
  x_max = count * x_step;
  if (decay(x_max) < 1.0) {  // the last point must sit beyond the turning point
    x_max = (count + 1) * x_step;
    out.push_back(0.0);
  }
  const int n_last = static_cast<int>(out.size());
  auto seed = detail::scaled_kbessel_imag_contour(tau, x_max);
  // State in t = log x: y = K, yp = x K'. y'' = (x^2 - tau^2) y.
  double t = std::log(x_max);
  double y = seed[0];
  double yp = x_max * seed[1];
  out[static_cast<std::size_t>(n_last - 1)] = y;
  const double tau2 = tau * tau;
  auto rhs = [&](double tt, double yy) { return (std::exp(2.0 * tt) - tau2) * yy; };
  const double omega_h = tau > 60.0 ? 0.05 : 0.02;
  for (int n = n_last - 1; n >= 1; --n) {
    const double t_target = std::log(n * x_step);
    while (t > t_target) {
      const double x = std::exp(t);
      const double w2 = std::abs(x * x - tau2);
      const double scale = std::max({std::sqrt(w2), std::cbrt(2.0 * x * x), 1.0});
      double h = omega_h / scale;
      if (t - h < t_target) h = t - t_target;
      // Classical RK4 stepping backward.
      const double k1y = yp, k1p = rhs(t, y);
      const double k2y = yp - 0.5 * h * k1p, k2p = rhs(t - 0.5 * h, y - 0.5 * h * k1y);
      const double k3y = yp - 0.5 * h * k2p, k3p = rhs(t - 0.5 * h, y - 0.5 * h * k2y);
      const double k4y = yp - h * k3p, k4p = rhs(t - h, y - h * k3y);
      y -= h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      yp -= h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
      t -= h;
    }
    t = t_target;
    out[static_cast<std::size_t>(n - 1)] = y;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dedekind eta
// ---------------------------------------------------------------------------

namespace detail {

// eta at a point with Im z >= ~0.8 via the pentagonal-number series.
inline Complex eta_series(Complex z) {
  Complex sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double e1 = 0.5 * k * (3.0 * k - 1.0);
    const double e2 = 0.5 * k * (3.0 * k + 1.0);
    const Complex t = std::exp(2.0 * kPi * kI * z * e1) + std::exp(2.0 * kPi * kI * z * e2);
    sum += (k % 2 == 0 ? 1.0 : -1.0) * t;
    if (std::abs(t) < 1e-18) break;
  }
  return std::exp(kPi * kI * z / 12.0) * sum;
}

// eta'/eta = (pi i / 12) E_2 at a point with Im z >= ~0.8.
inline Complex eta_log_derivative_series(Complex z) {
  const Complex q = std::exp(2.0 * kPi * kI * z);
  Complex sum = 0.0;
  Complex qn = 1.0;
  for (int n = 1; n < 400; ++n) {
    qn *= q;
    double sigma1 = 0.0;
    for (int d = 1; d * d <= n; ++d) {
      if (n % d) continue;
      sigma1 += d;
      if (d * d != n) sigma1 += n / d;
    }
    const Complex term = sigma1 * qn;
    sum += term;
    if (std::abs(term) < 1e-20 * std::max(1.0, std::abs(sum)) && std::abs(qn) < 1e-22) break;
  }
  return kPi * kI / 12.0 * (1.0 - 24.0 * sum);
}

}  // namespace detail

/// Dedekind eta(z) = q^{1/24} prod (1 - q^n), evaluated in the fundamental domain
/// and carried back with the multiplier of z -> z + 1 and z -> -1/z.
inline Complex dedekind_eta(Complex z) {
  if (!(z.imag() > 0.0)) throw DomainError("dedekind_eta: Im z must be positive");
  Complex factor = 1.0;
  for (int it = 0; it < 10000; ++it) {
    const double k = std::round(z.real());
    if (k != 0.0) {
      // eta(z) = e^{pi i k / 12} eta(z - k)
      factor *= std::exp(kPi * kI * k / 12.0);
      z -= k;
    }
    if (std::norm(z) >= 1.0 - 1e-15) return factor * detail::eta_series(z);
    // eta(z) = eta(-1/z) / sqrt(-i z)
    factor /= std::sqrt(-kI * z);
    z = -1.0 / z;
  }
  throw ConvergenceError("dedekind_eta: reduction did not terminate");
}

/// eta'(z)/eta(z) = (pi i / 12) E_2(z).
inline Complex eta_log_derivative(Complex z) {
  if (!(z.imag() > 0.0)) throw DomainError("eta_log_derivative: Im z must be positive");
  // Record the reduction, then unwind: for z = -1/z',
  // (eta'/eta)(z) = (eta'/eta)(z') / z^2 - 1/(2 z).
  std::vector<Complex> inversions;
  for (int it = 0; it < 10000; ++it) {
    z -= std::round(z.real());
    if (std::norm(z) >= 1.0 - 1e-15) break;
    inversions.push_back(z);
    z = -1.0 / z;
  }
  Complex value = detail::eta_log_derivative_series(z);
  for (auto it = inversions.rbegin(); it != inversions.rend(); ++it) {
    const Complex w = *it;  // point before inversion
    value = value / (w * w) - 0.5 / w;
  }
  return value;
}

// ---------------------------------------------------------------------------
// Phase of xi on Re s = 1
// ---------------------------------------------------------------------------

/// Continuous branch psi(t) = arg xi(1 + 2 i t) on a grid, anchored at -pi/2 as t -> 0+.
struct ArgTrack {
  std::vector<double> t_grid;
  std::vector<double> psi_values;
  double max_step = 0.0;  // largest |psi[k+1] - psi[k]|
};

namespace detail {

// psi(t) without the arg zeta part: -t log pi + Im log Gamma(1/2 + i t).
inline double psi_gamma_part(double t) {
  return -t * std::log(kPi) + log_gamma(Complex(0.5, t)).imag();
}

inline Complex zeta_on_one_line(double t) { return riemann_zeta(Complex(1.0, 2.0 * t)); }

inline double principal_arg_ratio(Complex a, Complex b) { return std::arg(a / b); }

}  // namespace detail

/// Builds psi on {t0, t0 + step, ...} up to t_max, t0 = min(1e-4, step). Steps are
/// subdivided where the arg-zeta increment exceeds 1 rad or the total jump exceeds pi/2.
inline ArgTrack psi_arg_xi(double t_max, double step) {
  if (!(t_max > 0.0) || !(step > 0.0)) throw DomainError("psi_arg_xi: t_max and step must be positive");
  ArgTrack track;
  double t = std::min(1e-4, step);
  Complex zeta_prev = detail::zeta_on_one_line(t);
  // zeta(1 + 2it) ~ 1/(2it) for small t: principal arg is near -pi/2.
  double arg_zeta = std::arg(zeta_prev);
  track.t_grid.push_back(t);
  track.psi_values.push_back(detail::psi_gamma_part(t) + arg_zeta);
  while (t < t_max - 1e-12) {
    const double target = std::min(t + step, t_max);
    double h = target - t;
    int depth = 0;
    while (true) {
      const double tn = t + h;
      const Complex zeta_next = detail::zeta_on_one_line(tn);
      const double dz = detail::principal_arg_ratio(zeta_next, zeta_prev);
      const double psi_next = detail::psi_gamma_part(tn) + arg_zeta + dz;
      const double jump = psi_next - track.psi_values.back();
      if ((std::abs(dz) > 1.0 || std::abs(jump) > 0.5 * kPi) && depth < 40) {
        h *= 0.5;
        ++depth;
        continue;
      }
      if (std::abs(jump) >= kPi) throw ConvergenceError("psi_arg_xi: unwrapping failed");
      t = tn;
      arg_zeta += dz;
      zeta_prev = zeta_next;
      track.t_grid.push_back(t);
      track.psi_values.push_back(psi_next);
      track.max_step = std::max(track.max_step, std::abs(jump));
      break;
    }
  }
  return track;
}

/// psi(t) at an arbitrary t inside the track, on the track's branch.
inline double psi_at(const ArgTrack& track, double t) {
  if (track.t_grid.empty()) throw DomainError("psi_at: empty track");
  auto it = std::lower_bound(track.t_grid.begin(), track.t_grid.end(), t);
  std::size_t k;
  if (it == track.t_grid.end()) {
    k = track.t_grid.size() - 1;
  } else {
    k = static_cast<std::size_t>(it - track.t_grid.begin());
    if (k > 0 && (t - track.t_grid[k - 1]) < (track.t_grid[k] - t)) --k;
  }
  const double tk = track.t_grid[k];
  const double arg_zeta_k = track.psi_values[k] - detail::psi_gamma_part(tk);
  const double dz = detail::principal_arg_ratio(detail::zeta_on_one_line(t), detail::zeta_on_one_line(tk));
  return detail::psi_gamma_part(t) + arg_zeta_k + dz;
}

/// psi'(t) by central differences of psi_at.
inline double psi_derivative(const ArgTrack& track, double t, double h = 1e-4) {
  return (psi_at(track, t + h) - psi_at(track, t - h)) / (2.0 * h);
}

}  // namespace automorphic
