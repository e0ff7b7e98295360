#pragma once

// Gauss-Legendre rules and composite panel integration.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

namespace automorphic::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule of order n by Newton iteration on P_n.
inline Rule gauss_legendre(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

inline const Rule& gl16() {
  static const Rule r = gauss_legendre(16);
  return r;
}

/// Nodes and weights of a composite rule on [a, b] with panels of (at most) `width`.
inline std::vector<std::pair<double, double>> composite_nodes(double a, double b, double width,
                                                              const Rule& rule = gl16()) {
  std::vector<std::pair<double, double>> out;
  if (!(b > a)) return out;
  auto panels = static_cast<std::size_t>(std::ceil((b - a) / width - 1e-12));
  if (panels == 0) panels = 1;
  const double h = (b - a) / static_cast<double>(panels);
  out.reserve(panels * rule.nodes.size());
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      out.emplace_back(mid + 0.5 * h * rule.nodes[k], 0.5 * h * rule.weights[k]);
  }
  return out;
}

/// Composite Gauss-Legendre integral of f over [a, b].
template <class F>
auto integrate(F&& f, double a, double b, double width, const Rule& rule = gl16()) {
  using R = decltype(f(a));
  R sum{};
  for (auto [x, w] : composite_nodes(a, b, width, rule)) sum += w * f(x);
  return sum;
}

}  // namespace automorphic::quad
