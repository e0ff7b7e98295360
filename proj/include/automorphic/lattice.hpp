#pragma once

// Positive-definite quadratic forms on Z^r, short-vector enumeration, and
// reduction of points of the upper half-plane to the standard fundamental domain.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "automorphic/errors.hpp"

namespace automorphic {

inline constexpr int kMaxDimension = 6;
inline constexpr std::size_t kDefaultVectorCap = 10'000'000;

using Matrix = Eigen::MatrixXd;

/// Lower-triangular L with L L^T = Q. Throws DomainError on a non-positive pivot.
inline Matrix cholesky(const Matrix& q) {
  const auto r = q.rows();
  Matrix l = Matrix::Zero(r, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    double diag = q(j, j);
    for (Eigen::Index k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) throw DomainError("cholesky: matrix is not positive-definite");
    l(j, j) = std::sqrt(diag);
    for (Eigen::Index i = j + 1; i < r; ++i) {
      double v = q(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

/// Real symmetric positive-definite r x r Gram matrix of a quadratic form
/// Q[v] = v Q v^T on Z^r, 2 <= r <= 6.
class GramMatrix {
 public:
  explicit GramMatrix(Matrix entries) : q_(std::move(entries)) {
    if (q_.rows() != q_.cols()) throw DomainError("GramMatrix: matrix must be square");
    const auto r = q_.rows();
    if (r < 2 || r > kMaxDimension)
      throw DomainError("GramMatrix: dimension " + std::to_string(r) + " outside [2, 6]");
    const double scale = q_.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < i; ++j)
        if (std::abs(q_(i, j) - q_(j, i)) > 1e-14 * std::max(1.0, scale))
          throw DomainError("GramMatrix: matrix is not symmetric");
    q_ = 0.5 * (q_ + q_.transpose()).eval();
    chol_ = cholesky(q_);
  }

  /// Row-major entries.
  static GramMatrix from_row_major(int r, std::span<const double> entries) {
    if (r < 1 || static_cast<std::size_t>(r * r) != entries.size())
      throw DomainError("GramMatrix: expected r*r entries");
    Matrix m(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) m(i, j) = entries[static_cast<std::size_t>(i * r + j)];
    return GramMatrix(std::move(m));
  }

  static GramMatrix identity(int r) { return GramMatrix(Matrix::Identity(r, r)); }

  int dim() const { return static_cast<int>(q_.rows()); }
  double operator()(int i, int j) const { return q_(i, j); }
  const Matrix& matrix() const { return q_; }
  const Matrix& cholesky_factor() const { return chol_; }

  double determinant() const {
    double d = 1.0;
    for (int i = 0; i < dim(); ++i) d *= chol_(i, i) * chol_(i, i);
    return d;
  }

  GramMatrix inverse() const {
    Matrix inv = q_.llt().solve(Matrix::Identity(dim(), dim()));
    return GramMatrix(0.5 * (inv + inv.transpose()));
  }

  GramMatrix scaled(double c) const { return GramMatrix(c * q_); }

  /// Q[v] = v Q v^T.
  template <class Int>
  double value(std::span<const Int> v) const {
    double sum = 0.0;
    for (int i = 0; i < dim(); ++i) {
      double row = 0.0;
      for (int j = 0; j < dim(); ++j) row += q_(i, j) * static_cast<double>(v[static_cast<std::size_t>(j)]);
      sum += static_cast<double>(v[static_cast<std::size_t>(i)]) * row;
    }
    return sum;
  }

  /// U^T Q U for an integer change of basis U.
  GramMatrix transformed(const Matrix& u) const { return GramMatrix(u.transpose() * q_ * u); }

 private:
  Matrix q_;
  Matrix chol_;
};

/// Q' = Q / det(Q)^{1/r} with det Q' = 1, and the scale c = det(Q)^{1/r}.
inline std::pair<GramMatrix, double> normalize_det(const GramMatrix& q) {
  const double c = std::pow(q.determinant(), 1.0 / q.dim());
  return {q.scaled(1.0 / c), c};
}

struct LatticeVector {
  std::array<std::int32_t, kMaxDimension> coords{};
  double norm = 0.0;  // Q[v]
};

/// Calls visit(coords, Q[v]) for every nonzero v in Z^r with Q[v] <= bound, by
/// Fincke-Pohst back-substitution on the Cholesky factor. Returns the count.
template <class Visit>
std::size_t for_each_vector(const GramMatrix& q, double bound, Visit&& visit,
                            std::size_t cap = kDefaultVectorCap) {
  if (!(bound > 0.0)) throw DomainError("enumerate_vectors: bound must be positive");
  const int r = q.dim();
  const Matrix& l = q.cholesky_factor();
  // Q[v] = sum_i d_i (v_i + sum_{j>i} mu_ij v_j)^2 with d_i = L_ii^2, mu_ij = L_ji / L_ii.
  std::array<double, kMaxDimension> d{};
  std::array<std::array<double, kMaxDimension>, kMaxDimension> mu{};
  for (int i = 0; i < r; ++i) {
    d[i] = l(i, i) * l(i, i);
    for (int j = i + 1; j < r; ++j) mu[i][j] = l(j, i) / l(i, i);
  }
  const double slack = 1e-9 * std::max(1.0, bound);
  std::array<std::int32_t, kMaxDimension> v{};
  std::size_t count = 0;

  std::function<void(int, double)> descend = [&](int i, double budget) {
    double center = 0.0;
    for (int j = i + 1; j < r; ++j) center -= mu[i][j] * v[j];
    const double half = std::sqrt(std::max(0.0, budget + slack) / d[i]);
    const auto lo = static_cast<std::int32_t>(std::ceil(center - half));
    const auto hi = static_cast<std::int32_t>(std::floor(center + half));
    for (std::int32_t x = lo; x <= hi; ++x) {
      v[i] = x;
      const double diff = x - center;
      const double used = d[i] * diff * diff;
      if (i == 0) {
        bool zero = true;
        for (int k = 0; k < r; ++k) zero = zero && v[k] == 0;
        if (zero) continue;
        const double norm = q.value(std::span<const std::int32_t>(v.data(), static_cast<std::size_t>(r)));
        if (norm > bound) continue;
        if (++count > cap) throw CapExceeded("enumerate_vectors: more than " + std::to_string(cap) + " vectors");
        visit(std::span<const std::int32_t>(v.data(), static_cast<std::size_t>(r)), norm);
      } else {
        descend(i - 1, budget - used);
      }
    }
    v[i] = 0;
  };
  descend(r - 1, bound);
  return count;
}

/// All nonzero v with Q[v] <= bound, sorted by (Q[v], lexicographic coordinates).
inline std::vector<LatticeVector> enumerate_vectors(const GramMatrix& q, double bound,
                                                    std::size_t cap = kDefaultVectorCap) {
  std::vector<LatticeVector> out;
  for_each_vector(
      q, bound,
      [&](std::span<const std::int32_t> v, double norm) {
        LatticeVector lv;
        std::copy(v.begin(), v.end(), lv.coords.begin());
        lv.norm = norm;
        out.push_back(lv);
      },
      cap);
  std::sort(out.begin(), out.end(), [](const LatticeVector& a, const LatticeVector& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return a.coords < b.coords;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Upper half-plane
// ---------------------------------------------------------------------------

/// z = x + i y with y > 0.
class UpperHalfPoint {
 public:
  UpperHalfPoint(double x, double y) : x_(x), y_(y) {
    if (!(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      throw DomainError("UpperHalfPoint: y must be positive and finite");
  }
  explicit UpperHalfPoint(std::complex<double> z) : UpperHalfPoint(z.real(), z.imag()) {}

  double x() const { return x_; }
  double y() const { return y_; }
  std::complex<double> complex() const { return {x_, y_}; }

 private:
  double x_;
  double y_;
};

/// Integer matrix [[a, b], [c, d]] with ad - bc = 1.
struct Sl2Z {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  Sl2Z operator*(const Sl2Z& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  std::int64_t det() const { return a * d - b * c; }
  std::complex<double> apply(std::complex<double> z) const {
    return (static_cast<double>(a) * z + static_cast<double>(b)) /
           (static_cast<double>(c) * z + static_cast<double>(d));
  }
  bool operator==(const Sl2Z&) const = default;
};

struct Reduction {
  UpperHalfPoint point;
  Sl2Z gamma;
};

/// Moves z into |x| <= 1/2, |z| >= 1. Boundary ties go to x <= 0.
inline Reduction reduce_sl2(const UpperHalfPoint& z0) {
  std::complex<double> z = z0.complex();
  Sl2Z g;
  const Sl2Z s{0, -1, 1, 0};
  for (int it = 0; it < 100000; ++it) {
    const double n = std::floor(z.real() + 0.5);
    if (n != 0.0) {
      z -= n;
      g = Sl2Z{1, -static_cast<std::int64_t>(n), 0, 1} * g;
    }
    if (std::norm(z) >= 1.0) break;
    z = -1.0 / z;
    g = s * g;
  }
  // On the unit circle prefer the left half.
  if (std::abs(std::norm(z) - 1.0) < 1e-14 && z.real() > 1e-14) {
    g = s * g;
    z = -1.0 / z;
  }
  const auto recomputed = g.apply(z0.complex());
  return {UpperHalfPoint(recomputed), g};
}

/// Det-1 form Q[(m, n)] = |m z + n|^2 / y.
inline GramMatrix gram_of_point(const UpperHalfPoint& z) {
  const double x = z.x(), y = z.y();
  Matrix m(2, 2);
  m << (x * x + y * y) / y, x / y, x / y, 1.0 / y;
  return GramMatrix(std::move(m));
}

}  // namespace automorphic
