#pragma once

// The Schrodinger operator S = -Delta + q with q = y^2 |grad E_1^*|^2 on the upper
// half-plane, Delta = y^2 (d_xx + d_yy). Its ground state is exp(-E_1^*) with bottom
// eigenvalue Delta E_1^* = 3/pi.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "automorphic/eisenstein.hpp"
#include "automorphic/errors.hpp"
#include "automorphic/lattice.hpp"
#include "automorphic/specfun.hpp"

namespace automorphic {

/// Delta E_1^* in the normalization Delta = y^2 (d_xx + d_yy).
inline constexpr double kGroundEigenvalue = 3.0 / std::numbers::pi;

struct Gradient {
  double dx;
  double dy;
};

/// Analytic gradient of E_1^* from eta'/eta: d_x log|eta| = Re(eta'/eta), d_y log|eta| = -Im(eta'/eta).
inline Gradient grad_e1_star(const UpperHalfPoint& z) {
  const Complex g = eta_log_derivative(z.complex());
  const double c = 12.0 / kPi;
  return {-c * g.real(), -3.0 / (kPi * z.y()) + c * g.imag()};
}

/// q(z) = y^2 |grad E_1^*|^2.
inline double potential_q(const UpperHalfPoint& z) {
  const Gradient g = grad_e1_star(z);
  return z.y() * z.y() * (g.dx * g.dx + g.dy * g.dy);
}

struct PotentialSample {
  UpperHalfPoint z;
  double q;
  Gradient grad;
  double lap_e1;
  double h;
};

using ScalarField = std::function<double(const UpperHalfPoint&)>;

/// Hyperbolic Laplacian by the 5-point stencil with one Richardson level:
/// (4 L_{h/2} - L_h) / 3, fourth order in h.
inline double fd_laplacian(const ScalarField& f, const UpperHalfPoint& z, double h) {
  if (!(h > 0.0) || !(h < z.y() / 10.0)) throw DomainError("fd_laplacian: need 0 < h < y/10");
  const double x = z.x(), y = z.y();
  const double centre = f(z);
  auto stencil = [&](double step) {
    const double sum = f({x + step, y}) + f({x - step, y}) + f({x, y + step}) + f({x, y - step});
    return y * y * (sum - 4.0 * centre) / (step * step);
  };
  return (4.0 * stencil(0.5 * h) - stencil(h)) / 3.0;
}

inline PotentialSample sample_potential(const UpperHalfPoint& z, double h = 1e-3) {
  return {z, potential_q(z), grad_e1_star(z), fd_laplacian(e1_star, z, h), h};
}

struct LaplaceCheck {
  double value;
  double deviation;  // value - 3/pi
};

inline LaplaceCheck check_laplace_e1star(const UpperHalfPoint& z, double h = 1e-3) {
  const double v = fd_laplacian(e1_star, z, h);
  return {v, v - kGroundEigenvalue};
}

namespace detail {

// E_1^* and its gradient in a wide floating type T from the real q-product
//   log|eta| = -pi y / 12 + (1/2) sum log(1 - 2 r^n cos(2 pi n x) + r^{2n}),  r = e^{-2 pi y}.
// Intended for y >= 1/2, where the product converges geometrically.
template <class T>
struct WideE1 {
  T value;
  T dx;
  T dy;
};

template <class T>
WideE1<T> e1_star_wide(const T& x, const T& y) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::log1p;
  using std::sin;
  const T pi = boost::math::constants::pi<T>();
  const T r = exp(-2 * pi * y);
  const T eps = std::numeric_limits<T>::epsilon() * T(1e-3);
  T sum = 0, sum_dx = 0, sum_dy = 0;
  T rn = r;
  for (int n = 1; n < 400 && rn > eps; ++n) {
    const T angle = 2 * pi * n * x;
    const T c = cos(angle);
    const T denom = 1 + rn * (rn - 2 * c);
    sum += log1p(rn * (rn - 2 * c));
    sum_dx += 4 * pi * n * rn * sin(angle) / denom;
    sum_dy += 4 * pi * n * rn * (c - rn) / denom;
    rn *= r;
  }
  const T log_abs_eta = -pi * y / 12 + sum / 2;
  const T dlog_dx = sum_dx / 2;
  const T dlog_dy = -pi / 12 + sum_dy / 2;
  const T six_pi = 6 / pi;
  const T constant = boost::math::constants::euler<T>() - boost::math::constants::ln_two<T>();
  return {six_pi * (constant - log(y) / 2 - 2 * log_abs_eta), -2 * six_pi * dlog_dx,
          six_pi * (-1 / (2 * y)) - 2 * six_pi * dlog_dy};
}

}  // namespace detail

/// |(-Delta_h + q) f - (3/pi) f| / |f| for f = exp(-E_1^*). The stencil and the potential
/// run in 113-bit floating point so that the h^4 truncation error of the stencil stays
/// visible above rounding for h >= 1e-3. Requires y >= 1/2.
inline double ground_state_residual(const UpperHalfPoint& z, double h = 1e-3) {
  using Wide = boost::multiprecision::cpp_bin_float_quad;
  if (!(h > 0.0) || !(h < z.y() / 10.0)) throw DomainError("ground_state_residual: need 0 < h < y/10");
  if (z.y() - 2.0 * h < 0.5) throw DomainError("ground_state_residual: needs y >= 1/2");
  const Wide x = z.x(), y = z.y(), hw = h;
  auto f = [](const Wide& px, const Wide& py) { return exp(-detail::e1_star_wide(px, py).value); };
  const Wide centre = f(x, y);
  auto stencil = [&](const Wide& step) {
    const Wide sum = f(x + step, y) + f(x - step, y) + f(x, y + step) + f(x, y - step);
    return y * y * (sum - 4 * centre) / (step * step);
  };
  const Wide lap = (4 * stencil(hw / 2) - stencil(hw)) / 3;
  const auto g = detail::e1_star_wide(x, y);
  const Wide q = y * y * (g.dx * g.dx + g.dy * g.dy);
  const Wide lambda = 3 / boost::math::constants::pi<Wide>();
  const Wide residual = abs(-lap + q * centre - lambda * centre) / centre;
  return residual.convert_to<double>();
}

// ---------------------------------------------------------------------------
// Factorization S = R L + Delta beta
// ---------------------------------------------------------------------------

/// Lowering operator in scalar form: L f = y (grad f + f grad beta), an orthonormal-frame
/// vector field; R is its adjoint for dx dy / y^2 twisted by beta:
///   R V = -y^2 [d_x(V_1 / y) + d_y(V_2 / y)] + y (beta_x V_1 + beta_y V_2).
/// Then R L f = S f - (Delta beta) f, with beta = E_1^*.
struct Factorization {
  double step = 1e-3;

  // Fourth-order central difference of g at 0.
  template <class G>
  static double derivative(G&& g, double h) {
    return (8.0 * (g(h) - g(-h)) - (g(2.0 * h) - g(-2.0 * h))) / (12.0 * h);
  }

  std::array<double, 2> lower(const ScalarField& f, const UpperHalfPoint& z) const {
    const double x = z.x(), y = z.y(), h = step;
    const double fz = f(z);
    const double fx = derivative([&](double t) { return f({x + t, y}); }, h);
    const double fy = derivative([&](double t) { return f({x, y + t}); }, h);
    const Gradient b = grad_e1_star(z);
    return {y * (fx + fz * b.dx), y * (fy + fz * b.dy)};
  }

  double raise_lower(const ScalarField& f, const UpperHalfPoint& z) const {
    const double x = z.x(), y = z.y(), h = step;
    auto v_over_y = [&](double px, double py) {
      const auto v = lower(f, {px, py});
      return std::array<double, 2>{v[0] / py, v[1] / py};
    };
    const double div = derivative([&](double t) { return v_over_y(x + t, y)[0]; }, h) +
                       derivative([&](double t) { return v_over_y(x, y + t)[1]; }, h);
    const auto v = lower(f, z);
    const Gradient b = grad_e1_star(z);
    return -y * y * div + y * (b.dx * v[0] + b.dy * v[1]);
  }
};

/// Probe functions for the commutator identity.
inline ScalarField probe_ground_state() {
  return [](const UpperHalfPoint& p) { return std::exp(-e1_star(p)); };
}

inline ScalarField probe_power(double a = 0.7) {
  return [a](const UpperHalfPoint& p) { return std::pow(p.y(), a); };
}

/// (1 - rho^2 / R^2)^4 inside the Euclidean disc of radius R about `centre`, zero outside.
inline ScalarField probe_bump(Complex centre = {0.1, 1.5}, double radius = 0.3) {
  return [centre, radius](const UpperHalfPoint& p) {
    const double u = std::norm(p.complex() - centre) / (radius * radius);
    return u < 1.0 ? std::pow(1.0 - u, 4) : 0.0;
  };
}

struct CommutatorReport {
  std::array<double, 3> constant{};    // (S f - R L f) / f per probe, NaN when f(z) = 0
  double max_residual = 0.0;           // max |constant - 3/pi| / (3/pi)
  double ground_lowering = 0.0;        // |L e^{-E_1^*}| / e^{-E_1^*}
};

/// Checks S f - R L f = (Delta E_1^*) f at z for the ground state, y^{0.7}, and the bump.
inline CommutatorReport commutator_check(const UpperHalfPoint& z, double h = 1e-3) {
  const std::array<ScalarField, 3> probes{probe_ground_state(), probe_power(), probe_bump()};
  const Factorization fac{h};
  CommutatorReport out;
  const double q = potential_q(z);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double fz = probes[i](z);
    if (std::abs(fz) < 1e-8) {
      out.constant[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double s_f = -fd_laplacian(probes[i], z, h) + q * fz;
    out.constant[i] = (s_f - fac.raise_lower(probes[i], z)) / fz;
    out.max_residual =
        std::max(out.max_residual, std::abs(out.constant[i] - kGroundEigenvalue) / kGroundEigenvalue);
  }
  const auto l = fac.lower(probes[0], z);
  out.ground_lowering = std::hypot(l[0], l[1]) / probes[0](z);
  return out;
}

struct ProfileRow {
  double y;
  double q;
  double ratio;  // q / y^2
};

/// q(iy) and q(iy)/y^2 on y_min, y_min + step, ..., y_max.
inline std::vector<ProfileRow> potential_profile(double y_min, double y_max, double step) {
  if (!(y_min > 0.0) || !(y_max >= y_min) || !(step > 0.0)) throw DomainError("potential_profile: bad range");
  std::vector<ProfileRow> rows;
  for (int k = 0;; ++k) {
    const double y = y_min + k * step;
    if (y > y_max + 1e-12) break;
    const double q = potential_q({0.0, y});
    rows.push_back({y, q, q / (y * y)});
  }
  return rows;
}

}  // namespace automorphic
