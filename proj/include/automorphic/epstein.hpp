#pragma once

// Epstein zeta functions Z_r(Q, s) = sum' Q[v]^{-s}, continued to all of C through
// the split theta integral. Each half of the split reduces to incomplete gamma
// functions, which gives exponentially convergent sums with explicit tails.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "automorphic/errors.hpp"
#include "automorphic/lattice.hpp"
#include "automorphic/parallel.hpp"
#include "automorphic/specfun.hpp"

namespace automorphic {

/// Series or quadrature value together with its truncation bound.
struct EvalResult {
  Complex value;
  double error_bound = 0.0;
  int terms_used = 0;
};

/// Coefficients a_{-1}, a_0, ..., a_K of a Laurent expansion about `center`.
struct LaurentExpansion {
  Complex center;
  std::vector<Complex> coefficients;  // coefficients[k + 1] = a_k
  double radius = 0.0;
  double error_bound = 0.0;
  int nodes = 0;

  int max_order() const { return static_cast<int>(coefficients.size()) - 2; }

  Complex coefficient(int order) const {
    if (order < -1 || order > max_order()) throw DomainError("LaurentExpansion: order out of range");
    return coefficients[static_cast<std::size_t>(order + 1)];
  }

  Complex evaluate(Complex s) const {
    const Complex d = s - center;
    Complex sum = coefficients.front() / d;
    Complex p = 1.0;
    for (std::size_t k = 1; k < coefficients.size(); ++k) {
      sum += coefficients[k] * p;
      p *= d;
    }
    return sum;
  }
};

/// Laurent coefficients of f about `center` from the trapezoid rule on a circle.
/// f may have at most a simple pole at the center. The node count doubles until
/// successive coefficient sets agree to `tol` (relative to the largest one).
template <class F>
LaurentExpansion cauchy_laurent(F&& f, Complex center, int max_order, double radius = 0.1,
                                double tol = 1e-10, int initial_nodes = 64, int max_nodes = 1024) {
  if (max_order < 0) throw DomainError("cauchy_laurent: max_order must be non-negative");
  if (!(radius > 0.0)) throw DomainError("cauchy_laurent: radius must be positive");
  const auto count = static_cast<std::size_t>(max_order + 2);

  std::vector<Complex> samples;  // f on the current node set, in angular order
  auto sample_nodes = [&](int m, bool reuse) {
    std::vector<Complex> next(static_cast<std::size_t>(m));
    std::vector<std::size_t> fresh;
    for (int j = 0; j < m; ++j) {
      if (reuse && j % 2 == 0)
        next[static_cast<std::size_t>(j)] = samples[static_cast<std::size_t>(j / 2)];
      else
        fresh.push_back(static_cast<std::size_t>(j));
    }
    parallel_for(fresh.size(), [&](std::size_t i) {
      const std::size_t j = fresh[i];
      const Complex node = center + std::polar(radius, 2.0 * kPi * static_cast<double>(j) / m);
      next[j] = f(node);
    });
    samples = std::move(next);
  };
  auto coefficients = [&](int m) {
    std::vector<Complex> a(count);
    for (int j = 0; j < m; ++j) {
      const double theta = 2.0 * kPi * static_cast<double>(j) / m;
      for (std::size_t idx = 0; idx < count; ++idx) {
        const int k = static_cast<int>(idx) - 1;
        a[idx] += samples[static_cast<std::size_t>(j)] * std::polar(std::pow(radius, -k), -k * theta);
      }
    }
    for (auto& c : a) c /= static_cast<double>(m);
    return a;
  };

  int m = initial_nodes;
  sample_nodes(m, false);
  std::vector<Complex> prev = coefficients(m);
  while (m < max_nodes) {
    m *= 2;
    sample_nodes(m, true);
    std::vector<Complex> cur = coefficients(m);
    // Compare contributions a_k rho^k on the contour, so high orders are not held to
    // an absolute accuracy that rounding in the samples cannot deliver.
    double change = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double weight = std::pow(radius, static_cast<double>(i) - 1.0);
      change = std::max(change, std::abs(cur[i] - prev[i]) * weight);
      scale = std::max(scale, std::abs(cur[i]) * weight);
    }
    if (change <= tol * std::max(1.0, scale)) {
      // Rounding in the samples limits every coefficient to about eps * max|f| / rho^k.
      double fmax = 0.0;
      for (const auto& v : samples) fmax = std::max(fmax, std::abs(v));
      const double rounding = 1e-15 * fmax * std::pow(radius, -max_order);
      return {center, std::move(cur), radius, std::max(change, rounding), m};
    }
    prev = std::move(cur);
  }
  throw ConvergenceError("cauchy_laurent: coefficients did not settle by node doubling");
}

namespace detail {

struct Shell {
  double norm;       // pi * Q[v]
  int multiplicity;
};

// Distinct values of pi * Q[v] <= x_max, ascending, with multiplicities.
inline std::vector<Shell> shells_of(const GramMatrix& q, double x_max, std::size_t cap) {
  std::vector<double> norms;
  for_each_vector(
      q, x_max / kPi, [&](std::span<const std::int32_t>, double n) { norms.push_back(kPi * n); }, cap);
  std::sort(norms.begin(), norms.end());
  std::vector<Shell> out;
  for (double n : norms) {
    if (!out.empty() && n - out.back().norm <= 1e-14 * n)
      ++out.back().multiplicity;
    else
      out.push_back({n, 1});
  }
  return out;
}

// x^{-s} Gamma(s, x).
inline Complex incomplete_term(Complex s, double x) {
  return std::exp(-s * std::log(x)) * upper_incomplete_gamma(s, x).value;
}

}  // namespace detail

/// Evaluates Z_r(Q, s) and the completed function for one fixed form. Shell lists for
/// the normalized form and its inverse are cached and grown on demand; evaluation is
/// thread-safe.
class EpsteinEvaluator {
 public:
  explicit EpsteinEvaluator(const GramMatrix& q, std::size_t cap = kDefaultVectorCap)
      : original_(q), normalized_(normalize_det(q).first), inverse_(normalized_.inverse()),
        scale_(normalize_det(q).second), cap_(cap) {}

  int dim() const { return original_.dim(); }
  double scale() const { return scale_; }
  const GramMatrix& normalized() const { return normalized_; }

  /// Lambda(s) = pi^{-s} Gamma(s) Z_r(Q', s) for the det-1 form Q' = Q / scale.
  /// Poles at s = 0 and s = r/2. `tol` is relative to |Lambda(s)|.
  EvalResult completed(Complex s, double tol = 1e-10) const {
    const double half_r = 0.5 * dim();
    if (std::abs(s) < 1e-15 || std::abs(s - half_r) < 1e-15)
      throw PoleError("epstein: completed function has a pole at s = 0 and s = r/2");
    return bracket(s, tol, 1.0);
  }

  /// Z_r(Q, s) for the original (not normalized) form. Finite at s = 0 (value -1),
  /// pole at s = r/2. `tol` is relative to |Z|.
  EvalResult zeta(Complex s, double tol = 1e-10) const {
    const double half_r = 0.5 * dim();
    if (std::abs(s - half_r) < 1e-15) throw PoleError("epstein: pole at s = r/2");
    if (std::abs(s) < 1e-15) return {Complex(-1.0, 0.0), 1e-15, 0};
    // Z = pi^s / Gamma(s) * Lambda, then homogeneity for the scale.
    const Complex factor = std::exp(s * std::log(kPi) - s * std::log(scale_)) * reciprocal_gamma(s);
    if (factor == Complex(0.0, 0.0)) return {Complex(0.0, 0.0), 0.0, 0};  // trivial zeros
    EvalResult lam = bracket(s, tol, std::abs(factor));
    lam.value *= factor;
    lam.error_bound *= std::abs(factor);
    return lam;
  }

 private:
  struct Cache {
    double x_max = 0.0;
    std::shared_ptr<const std::vector<detail::Shell>> direct, dual;
  };

  static Complex reciprocal_gamma(Complex s) {
    if (detail::is_nonpositive_integer(s)) return 0.0;
    return std::exp(-log_gamma(s));
  }

  Cache shells(double x_max) const {
    std::lock_guard lock(mutex_);
    if (cache_.x_max < x_max) {
      const double grown = std::max(x_max, cache_.x_max * 1.25);
      cache_.direct = std::make_shared<const std::vector<detail::Shell>>(detail::shells_of(normalized_, grown, cap_));
      cache_.dual = std::make_shared<const std::vector<detail::Shell>>(detail::shells_of(inverse_, grown, cap_));
      cache_.x_max = grown;
    }
    return cache_;
  }

  // Bound on sum over shells with norm > x of |x^{-a} Gamma(a, x)| for a det-1 lattice,
  // from the shell density x^{r/2-1}/Gamma(r/2) and |Gamma(a, x)| <= x^{Re a - 1} e^{-x} / (1 - |a-1|/x).
  double tail_bound(Complex a, double x) const {
    const double half_r = 0.5 * dim();
    const double ratio = std::abs(a - 1.0) / x;
    if (ratio >= 0.5) return std::numeric_limits<double>::infinity();
    const double exponent = half_r - 2.0;
    const double gamma_tail = exponent > 0.0 ? 1.0 / (1.0 - exponent / x) : 1.0;
    constexpr double fudge = 3.0;  // lattice-count irregularity
    return fudge * std::pow(x, exponent) * std::exp(-x) * gamma_tail /
           ((1.0 - ratio) * std::tgamma(half_r));
  }

  // Partial sums of weighted incomplete-gamma terms over shells up to x (fixed order).
  static std::pair<Complex, double> shell_sum(const std::vector<detail::Shell>& list, Complex a, double x_lo,
                                              double x_hi) {
    const auto lo = std::upper_bound(list.begin(), list.end(), x_lo,
                                     [](double v, const detail::Shell& sh) { return v < sh.norm; });
    const auto hi = std::upper_bound(list.begin(), list.end(), x_hi,
                                     [](double v, const detail::Shell& sh) { return v < sh.norm; });
    const auto n = static_cast<std::size_t>(hi - lo);
    constexpr std::size_t chunk = 2048;
    const std::size_t chunks = (n + chunk - 1) / chunk;
    std::vector<Complex> part(chunks);
    std::vector<double> mag(chunks);
    parallel_for(chunks, [&](std::size_t c) {
      const auto begin = lo + static_cast<std::ptrdiff_t>(c * chunk);
      const auto end = lo + static_cast<std::ptrdiff_t>(std::min(n, (c + 1) * chunk));
      Complex sum = 0.0;
      double abs_sum = 0.0;
      for (auto it = begin; it != end; ++it) {
        const Complex term = static_cast<double>(it->multiplicity) * detail::incomplete_term(a, it->norm);
        sum += term;
        abs_sum += std::abs(term);
      }
      part[c] = sum;
      mag[c] = abs_sum;
    });
    Complex total = 0.0;
    double total_mag = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
      total += part[c];
      total_mag += mag[c];
    }
    return {total, total_mag};
  }

  // Lambda(s) with the cutoff raised until weight * bound <= tol * weight * |Lambda|.
  EvalResult bracket(Complex s, double tol, double weight) const {
    const double half_r = 0.5 * dim();
    const Complex dual_s = half_r - s;
    const Complex rational = 2.0 / (2.0 * s - 2.0 * half_r) - 2.0 / (2.0 * s);
    double x = std::max({30.0, 3.0 * std::abs(s), 3.0 * std::abs(dual_s)});
    double done = 0.0;
    Complex direct = 0.0, dual = 0.0;
    double magnitude = std::abs(rational);
    for (int round = 0; round < 60; ++round) {
      const Cache c = shells(x);
      const auto d1 = shell_sum(*c.direct, s, done, x);
      const auto d2 = shell_sum(*c.dual, dual_s, done, x);
      direct += d1.first;
      dual += d2.first;
      magnitude += d1.second + d2.second;
      done = x;
      const Complex value = direct + dual + rational;
      const double truncation = tail_bound(s, x) + tail_bound(dual_s, x);
      const double rounding = 1e-16 * magnitude * 4.0;
      const double bound = truncation + rounding;
      const bool rounding_floor = truncation < rounding;
      if (bound <= tol * std::abs(value) || rounding_floor || bound * weight < 1e-300) {
        int terms = 0;
        for (const auto& sh : *c.direct)
          if (sh.norm <= x) terms += sh.multiplicity;
        for (const auto& sh : *c.dual)
          if (sh.norm <= x) terms += sh.multiplicity;
        return {value, bound, terms};
      }
      x += 10.0;
    }
    throw ConvergenceError("epstein: tail bound did not reach the requested tolerance");
  }

  GramMatrix original_;
  GramMatrix normalized_;
  GramMatrix inverse_;
  double scale_;
  std::size_t cap_;
  mutable std::mutex mutex_;
  mutable Cache cache_;
};

/// Z_r(Q, s) everywhere except the pole at s = r/2.
inline EvalResult epstein_zeta(const GramMatrix& q, Complex s, double tol = 1e-10) {
  return EpsteinEvaluator(q).zeta(s, tol);
}

/// Relative residual |Lambda_Q(s) - Lambda_{Q^{-1}}(r/2 - s)| / |Lambda_Q(s)| for the
/// completed functions of the det-1 normalized form and its inverse.
inline double check_functional_equation(const GramMatrix& q, Complex s, double tol = 1e-12) {
  const GramMatrix qn = normalize_det(q).first;
  const EpsteinEvaluator direct(qn);
  const EpsteinEvaluator dual(qn.inverse());
  const double half_r = 0.5 * q.dim();
  const Complex a = direct.completed(s, tol).value;
  const Complex b = dual.completed(half_r - s, tol).value;
  return std::abs(a - b) / std::abs(a);
}

/// Laurent expansion of Z_r(Q, s) about `center` on a circle of radius 0.1.
inline LaurentExpansion epstein_laurent(const GramMatrix& q, Complex center, int max_order,
                                        double tol = 1e-10) {
  const EpsteinEvaluator ev(q);
  return cauchy_laurent([&](Complex s) { return ev.zeta(s, 1e-13).value; }, center, max_order, 0.1, tol);
}

/// Residue of Z_r(Q, s) at s = r/2 for a det-1 form, by contour extraction.
inline double epstein_residue(const GramMatrix& q) {
  if (std::abs(q.determinant() - 1.0) > 1e-10) throw DomainError("epstein_residue: form must have determinant 1");
  return epstein_laurent(q, Complex(0.5 * q.dim(), 0.0), 0).coefficient(-1).real();
}

/// The closed-form residue pi^{r/2} / Gamma(r/2) of a det-1 Epstein zeta function.
inline double epstein_residue_closed_form(int r) {
  return std::pow(kPi, 0.5 * r) / std::tgamma(0.5 * r);
}

}  // namespace automorphic
