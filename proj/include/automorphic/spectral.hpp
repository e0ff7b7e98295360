#pragma once

// Exotic pseudo-Laplacian eigenvalues on the critical line, their spacing, the
// Green's function constant-term identity, and the J(w) repulsion experiment.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "automorphic/eisenstein.hpp"
#include "automorphic/errors.hpp"
#include "automorphic/lattice.hpp"
#include "automorphic/parallel.hpp"
#include "automorphic/quadrature.hpp"
#include "automorphic/specfun.hpp"

namespace automorphic {

/// Volume of the modular surface for dx dy / y^2.
inline constexpr double kModularVolume = std::numbers::pi / 3.0;

/// Numerical volume of {|x| <= 1/2, |z| >= 1}: int_{-1/2}^{1/2} dx / sqrt(1 - x^2).
inline double modular_volume_numeric() {
  return quad::integrate([](double x) { return 1.0 / std::sqrt(1.0 - x * x); }, -0.5, 0.5, 0.1);
}

// ---------------------------------------------------------------------------
// Exotic eigenvalues
// ---------------------------------------------------------------------------

struct SpectralRoot {
  double t;
  Complex w;       // 1/2 + i t
  double lambda;   // w (w - 1) = -1/4 - t^2
  double residual; // |a^w + c_w a^{1-w}|
  double a;
};

/// y^w + c_w y^{1-w}, the constant term of E_w at height y.
inline Complex eisenstein_constant_term(Complex w, double y) {
  const double ly = std::log(y);
  return std::exp(w * ly) + c_scattering(w) * std::exp((1.0 - w) * ly);
}

/// Phase t log a + psi(t) whose cosine vanishes exactly at the exotic roots.
inline double exotic_phase(const ArgTrack& track, double a, double t) {
  return t * std::log(a) + psi_at(track, t);
}

/// Net number of zeros of cos(phase) on [t_min, t_max] predicted from the phase increment.
inline long predicted_root_count(const ArgTrack& track, double a, double t_min, double t_max) {
  auto index = [&](double t) { return static_cast<long>(std::floor((exotic_phase(track, a, t) + 0.5 * kPi) / kPi)); };
  return index(t_max) - index(t_min);
}

/// Roots of cos(t log a + psi(t)) on [t_min, t_max], each bisected to 1e-12 and
/// re-validated against a^w + c_w a^{1-w} = 0.
inline std::vector<SpectralRoot> exotic_roots(double a, double t_min, double t_max, const ArgTrack& track) {
  if (!(a > 1.0)) throw DomainError("exotic_roots: need a > 1");
  if (!(t_min >= 0.1) || !(t_max > t_min)) throw DomainError("exotic_roots: need 0.1 <= t_min < t_max");
  if (track.t_grid.empty() || track.t_grid.back() < t_max - 1e-9)
    throw DomainError("exotic_roots: phase track does not reach t_max");
  auto phi = [&](double t) { return std::cos(exotic_phase(track, a, t)); };
  std::vector<double> grid{t_min};
  for (double t : track.t_grid)
    if (t > t_min && t < t_max) grid.push_back(t);
  grid.push_back(t_max);
  // Track steps are at most the requested step; refine so each cell holds at most one root.
  std::vector<double> fine;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((grid[i + 1] - grid[i]) / 0.02)));
    for (int k = 0; k < pieces; ++k) fine.push_back(grid[i] + (grid[i + 1] - grid[i]) * k / pieces);
  }
  fine.push_back(t_max);

  std::vector<std::pair<double, double>> brackets;
  double prev_t = fine.front(), prev_v = phi(prev_t);
  for (std::size_t i = 1; i < fine.size(); ++i) {
    const double t = fine[i], v = phi(t);
    if (prev_v == 0.0 || (prev_v < 0.0) != (v < 0.0)) brackets.emplace_back(prev_t, t);
    prev_t = t;
    prev_v = v;
  }
  std::vector<SpectralRoot> roots(brackets.size());
  parallel_for(brackets.size(), [&](std::size_t i) {
    double lo = brackets[i].first, hi = brackets[i].second;
    double flo = phi(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = phi(mid);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    const double t = 0.5 * (lo + hi);
    const Complex w(0.5, t);
    roots[i] = {t, w, -0.25 - t * t, std::abs(eisenstein_constant_term(w, a)), a};
  });
  return roots;
}

inline std::vector<SpectralRoot> exotic_roots(double a, double t_min, double t_max) {
  return exotic_roots(a, t_min, t_max, psi_arg_xi(t_max + 0.01, 0.05));
}

struct SpacingRow {
  double t;            // midpoint of consecutive roots
  double gap;
  double comparator;   // pi / (log a + psi'(t))
  double pi_over_log;  // pi / log t
};

inline std::vector<SpacingRow> spacing_statistics(const std::vector<SpectralRoot>& roots, const ArgTrack& track) {
  if (roots.size() < 3) throw DomainError("spacing_statistics: need at least 3 roots");
  std::vector<SpacingRow> rows;
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
    const double mid = 0.5 * (roots[i].t + roots[i + 1].t);
    const double gap = roots[i + 1].t - roots[i].t;
    const double slope = std::log(roots[i].a) + psi_derivative(track, mid);
    rows.push_back({mid, gap, kPi / slope, kPi / std::log(mid)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Green's function constant term
// ---------------------------------------------------------------------------

struct ContourConfig {
  double T = 300.0;
  double panel_width = 0.5;
  int nodes_per_panel = 16;
  double tail_bound = 0.0;  // filled in by the evaluators
};

/// E_{1/2 + i tau}(z) on demand, memoized per tau so grids that share nodes share work.
class CriticalLineCache {
 public:
  explicit CriticalLineCache(const UpperHalfPoint& z) : z_(z) {}

  const UpperHalfPoint& point() const { return z_; }

  /// Values at the given taus (>= 0), evaluated in parallel where missing.
  std::vector<Complex> values(const std::vector<double>& taus) {
    std::vector<double> missing;
    {
      std::lock_guard lock(mutex_);
      for (double t : taus)
        if (!memo_.count(t)) missing.push_back(t);
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::vector<Complex> fresh(missing.size());
    parallel_for(missing.size(), [&](std::size_t i) { fresh[i] = eisenstein_critical_line(z_, missing[i]).value; });
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < missing.size(); ++i) memo_[missing[i]] = fresh[i];
    std::vector<Complex> out;
    out.reserve(taus.size());
    for (double t : taus) out.push_back(memo_.at(t));
    return out;
  }

 private:
  UpperHalfPoint z_;
  std::mutex mutex_;
  std::map<double, Complex> memo_;
};

struct GreensResult {
  Complex lhs;
  Complex rhs;
  double rel_error;   // |lhs - rhs| / |rhs|
  double T;
  double tail_bound;  // estimate of the neglected |tau| > T contribution
};

/// Checks the constant term a^{1-w} E_w(z) / (1 - 2w) of the resolvent kernel against
/// its spectral expansion
///   3 / (pi (-lambda_w)) + (1/4pi) int_{-T}^{T} (a^{1-s} + c_{1-s} a^s) E_s(z) / (lambda_s - lambda_w) d tau.
inline GreensResult greens_constant_term_check(CriticalLineCache& cache, Complex w, double a, ContourConfig cfg = {}) {
  const UpperHalfPoint& z = cache.point();
  if (!(w.real() > 0.5)) throw DomainError("greens: need Re w > 1/2");
  if (std::abs(w.imag()) < 1e-12 && w.real() <= 1.0) throw DomainError("greens: w must avoid (1/2, 1]");
  if (!(a >= z.y())) throw DomainError("greens: need a >= Im z");
  if (!(cfg.T > 0.0)) throw DomainError("greens: need T > 0");
  const Complex lambda_w = w * (w - 1.0);

  const quad::Rule rule = quad::gauss_legendre(cfg.nodes_per_panel);
  const auto nodes = quad::composite_nodes(0.0, cfg.T, cfg.panel_width, rule);
  std::vector<double> taus;
  taus.reserve(nodes.size());
  for (const auto& [t, wt] : nodes) taus.push_back(t);
  const std::vector<Complex> e_vals = cache.values(taus);

  const double log_a = std::log(a);
  Complex integral = 0.0;
  double edge = 0.0;  // sup of |integrand| * tau^2 over the last tenth of [0, T]
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double tau = nodes[i].first;
    const Complex s(0.5, tau);
    const Complex c_dual = std::conj(c_scattering(s));  // c_{1-s} = c_{conj s} on the line
    const Complex numer = std::exp((1.0 - s) * log_a) + c_dual * std::exp(s * log_a);
    const double lambda_s = -0.25 - tau * tau;
    const Complex ne = numer * e_vals[i];
    // tau and -tau: E and the numerator conjugate, lambda_s is real.
    const Complex pair = ne / (lambda_s - lambda_w) + std::conj(ne) / (lambda_s - lambda_w);
    integral += nodes[i].second * pair;
    if (tau > 0.9 * cfg.T) edge = std::max(edge, std::abs(pair) * tau * tau);
  }
  const Complex lhs = 3.0 / (kPi * (-lambda_w)) + integral / (4.0 * kPi);
  const Complex rhs = std::exp((1.0 - w) * log_a) * eisenstein_sl2(z, w).value / (1.0 - 2.0 * w);
  // int_T^inf edge / tau^2 = edge / T, ignoring oscillation.
  const double tail = edge / cfg.T / (4.0 * kPi);
  return {lhs, rhs, std::abs(lhs - rhs) / std::abs(rhs), cfg.T, tail};
}

inline GreensResult greens_constant_term_check(const UpperHalfPoint& z, Complex w, double a, ContourConfig cfg = {}) {
  CriticalLineCache cache(z);
  return greens_constant_term_check(cache, w, a, cfg);
}

// ---------------------------------------------------------------------------
// J(w) and the repulsion experiment
// ---------------------------------------------------------------------------

/// zeta_K(s) / zeta(2s) for the imaginary quadratic field of discriminant D.
inline Complex dedekind_ratio(Complex s, std::int64_t disc) {
  return dedekind_zeta_quadratic(s, disc) / riemann_zeta(2.0 * s);
}

struct JValue {
  double value;
  double tail_bound;
  double window_fill;  // contribution of the interpolated window
};

/// J(1/2 + i tau) for a class-number-one field, built on a fixed tau-grid so that
/// F(tau') = |zeta_K / zeta(2s)|^2 is sampled once and reused for every tau.
class JEvaluator {
 public:
  JEvaluator(std::int64_t disc, ContourConfig cfg = {}) : disc_(disc), cfg_(cfg) {
    if (!is_class_number_one(disc)) throw DomainError("J: unsupported discriminant");
    const quad::Rule rule = quad::gauss_legendre(cfg.nodes_per_panel);
    nodes_ = quad::composite_nodes(0.0, cfg.T, cfg.panel_width, rule);
    values_.resize(nodes_.size());
    parallel_for(nodes_.size(), [&](std::size_t i) { values_[i] = F(nodes_[i].first); });
    double edge = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].first > 0.9 * cfg.T) edge = std::max(edge, values_[i]);
    edge_ = edge;
  }

  double F(double tau) const { return std::norm(dedekind_ratio(Complex(0.5, tau), disc_)); }

  /// Regularized integrand [F(t) - F(tau)] / (tau^2 - t^2), singular only through rounding near t = tau.
  double regularized(double t, double tau, double f_tau) const { return (F(t) - f_tau) / (tau * tau - t * t); }

  /// Quadratic through the regularized integrand at tau - 2d, tau + 2d, tau + 4d, evaluated at t.
  double window_interpolant(double t, double tau, double f_tau, double d) const {
    const double x0 = tau - 2.0 * d, x1 = tau + 2.0 * d, x2 = tau + 4.0 * d;
    const double y0 = regularized(x0, tau, f_tau), y1 = regularized(x1, tau, f_tau), y2 = regularized(x2, tau, f_tau);
    return y0 * (t - x1) * (t - x2) / ((x0 - x1) * (x0 - x2)) + y1 * (t - x0) * (t - x2) / ((x1 - x0) * (x1 - x2)) +
           y2 * (t - x0) * (t - x1) / ((x2 - x0) * (x2 - x1));
  }

  JValue operator()(double tau) const {
    if (!(tau > 0.5) || !(tau < cfg_.T - 1.0)) throw DomainError("J: need 0.5 < tau < T - 1");
    const double f_tau = F(tau);
    const double d = window_half_width();
    double integral = 0.0;
    double fill = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double t = nodes_[i].first, wt = nodes_[i].second;
      double g;
      if (std::abs(t - tau) < d) {
        g = window_interpolant(t, tau, f_tau, d);
        fill += wt * g;
      } else {
        g = (values_[i] - f_tau) / (tau * tau - t * t);
      }
      // t and -t contribute equally: F is even and lambda_s is real on the line.
      integral += 2.0 * wt * g;
    }
    // Analytic tail of the constant part: 2 int_T^inf F(tau) / (t^2 - tau^2) dt.
    const double T = cfg_.T;
    const double const_tail = 2.0 * f_tau / (2.0 * tau) * std::log((T + tau) / (T - tau));
    const double total = 3.0 / (kPi * (0.25 + tau * tau)) + (integral + const_tail) / (4.0 * kPi);
    // Neglected int_T^inf F(t) / (t^2 - tau^2), F taken at its sup near T.
    const double tail = 2.0 * edge_ / (T - tau) / (4.0 * kPi);
    return {total, tail, fill / (4.0 * kPi)};
  }

  double window_half_width() const { return 0.02; }
  const ContourConfig& config() const { return cfg_; }
  std::int64_t discriminant() const { return disc_; }

 private:
  std::int64_t disc_;
  ContourConfig cfg_;
  std::vector<std::pair<double, double>> nodes_;
  std::vector<double> values_;
  double edge_ = 0.0;
};

/// |theta E_w|^2 at the Heegner point: |(w_K/2) (sqrt|D|/2)^w zeta_K(w) / zeta(2w)|^2.
inline double theta_eisenstein_sq(double tau, std::int64_t disc) {
  const Complex w(0.5, tau);
  return std::norm(heegner_factor(w, disc) * dedekind_ratio(w, disc));
}

/// Real Hardy-type function of zeta_K on the critical line:
/// exp(i Im[s log(sqrt|D| / 2 pi) + log Gamma(s)]) zeta_K(s), s = 1/2 + i t.
inline double hardy_dedekind(double t, std::int64_t disc) {
  const Complex s(0.5, t);
  const double theta = (s * std::log(std::sqrt(static_cast<double>(-disc)) / (2.0 * kPi)) + log_gamma(s)).imag();
  return (std::polar(1.0, theta) * dedekind_zeta_quadratic(s, disc)).real();
}

/// Riemann-Siegel Z(t) = exp(i theta(t)) zeta(1/2 + i t).
inline double hardy_zeta(double t) {
  const Complex s(0.5, t);
  const double theta = log_gamma(0.5 * s).imag() - 0.5 * t * std::log(kPi);
  return (std::polar(1.0, theta) * riemann_zeta(s)).real();
}

/// Hardy function of L(s, chi_D) for D < 0 (odd character, root number 1).
inline double hardy_dirichlet(double t, std::int64_t disc) {
  const Complex s(0.5, t);
  const double theta = log_gamma(0.5 * (s + 1.0)).imag() + 0.5 * t * std::log(static_cast<double>(-disc) / kPi);
  return (std::polar(1.0, theta) * dirichlet_L(s, disc)).real();
}

/// Sign changes of f on [lo, hi] sampled with `step`, each bisected to `tol`.
template <class F>
std::vector<double> sign_change_roots(F&& f, double lo, double hi, double step, double tol = 1e-10) {
  std::vector<double> roots;
  double a = lo, fa = f(a);
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
  for (int k = 1; k <= n; ++k) {
    const double b = lo + (hi - lo) * k / n;
    const double fb = f(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      double l = a, r = b, fl = fa;
      while (r - l > tol) {
        const double m = 0.5 * (l + r);
        const double fm = f(m);
        if ((fm < 0.0) == (fl < 0.0)) {
          l = m;
          fl = fm;
        } else {
          r = m;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

struct RepulsionRow {
  double tau;
  double lhs;  // cos(phi) J
  double rhs;  // sin(phi) |theta E_w|^2 / (2 tau)
};

struct RepulsionInterval {
  double lo;           // consecutive zeros of cos(phi)
  double hi;
  int sign_changes;    // of lhs - rhs inside (lo, hi)
  std::optional<double> solution;
};

struct RepulsionReport {
  std::vector<RepulsionRow> rows;
  std::vector<RepulsionInterval> intervals;
  std::vector<double> dedekind_zeros;   // on-line zeros of zeta_K
  std::vector<double> factor_zeros;     // zeros of zeta and L(., chi_D), merged
  std::vector<double> j_zeros;          // sign changes of J
  std::vector<std::pair<double, double>> zero_distances;  // (zeta_K zero, distance above the nearest J zero below it)
};

inline RepulsionReport repulsion_experiment(std::int64_t disc, double a, double tau_lo, double tau_hi,
                                            const ContourConfig& cfg = {}, double grid_step = 0.01) {
  if (!(tau_lo > 0.5) || !(tau_hi > tau_lo)) throw DomainError("repulsion: bad tau range");
  const JEvaluator jev(disc, cfg);
  const ArgTrack track = psi_arg_xi(tau_hi + 1.0, 0.05);
  const double log_a = std::log(a);
  auto phase = [&](double t) { return t * log_a + psi_at(track, t); };

  RepulsionReport rep;
  const int n = static_cast<int>(std::ceil((tau_hi - tau_lo) / grid_step));
  rep.rows.resize(static_cast<std::size_t>(n) + 1);
  std::vector<double> j_vals(rep.rows.size());
  parallel_for(rep.rows.size(), [&](std::size_t k) {
    const double t = tau_lo + (tau_hi - tau_lo) * static_cast<double>(k) / n;
    const double ph = phase(t);
    const double j = jev(t).value;
    j_vals[k] = j;
    rep.rows[k] = {t, std::cos(ph) * j, std::sin(ph) * theta_eisenstein_sq(t, disc) / (2.0 * t)};
  });

  // Zeros of cos(phi) bound the intervals; count sign changes of lhs - rhs in each.
  const auto cos_zeros = sign_change_roots([&](double t) { return std::cos(phase(t)); }, tau_lo, tau_hi, 0.02, 1e-10);
  auto eq = [&](double t) {
    const double ph = phase(t);
    return std::cos(ph) * jev(t).value - std::sin(ph) * theta_eisenstein_sq(t, disc) / (2.0 * t);
  };
  for (std::size_t i = 0; i + 1 < cos_zeros.size(); ++i) {
    RepulsionInterval iv{cos_zeros[i], cos_zeros[i + 1], 0, std::nullopt};
    const double margin = 1e-7;
    const auto sols = sign_change_roots(eq, iv.lo + margin, iv.hi - margin, grid_step, 1e-9);
    iv.sign_changes = static_cast<int>(sols.size());
    if (sols.size() == 1) iv.solution = sols.front();
    rep.intervals.push_back(iv);
  }

  rep.dedekind_zeros = sign_change_roots([&](double t) { return hardy_dedekind(t, disc); }, tau_lo, tau_hi, 0.02, 1e-10);
  // Factor zeros on an offset grid so the two scans share no brackets.
  auto zz = sign_change_roots(hardy_zeta, tau_lo, tau_hi, 0.013, 1e-10);
  auto zl = sign_change_roots([&](double t) { return hardy_dirichlet(t, disc); }, tau_lo, tau_hi, 0.013, 1e-10);
  rep.factor_zeros = zz;
  rep.factor_zeros.insert(rep.factor_zeros.end(), zl.begin(), zl.end());
  std::sort(rep.factor_zeros.begin(), rep.factor_zeros.end());

  for (std::size_t k = 0; k + 1 < j_vals.size(); ++k)
    if ((j_vals[k] < 0.0) != (j_vals[k + 1] < 0.0)) {
      const double lo = rep.rows[k].tau, hi = rep.rows[k + 1].tau;
      rep.j_zeros.push_back(sign_change_roots([&](double t) { return jev(t).value; }, lo, hi, hi - lo, 1e-6).front());
    }
  for (double g : rep.dedekind_zeros) {
    const auto it = std::upper_bound(rep.j_zeros.begin(), rep.j_zeros.end(), g);
    if (it != rep.j_zeros.begin()) rep.zero_distances.emplace_back(g, g - *(it - 1));
  }
  return rep;
}

}  // namespace automorphic
