#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nlosbound {

/// Dense row-major matrix for the handful of small factorizations we need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric matrix, packed lower triangle: entry (i, j), i >= j, at i(i+1)/2 + j.
class SymMat {
 public:
  static constexpr std::size_t kMaxOrder = 64;

  SymMat() = default;
  explicit SymMat(std::size_t order, double fill = 0.0) : order_(order), data_(packed_size(order), fill) {
    if (order > kMaxOrder) throw std::invalid_argument("SymMat order above 64");
  }
  /// Row-major full matrix; only the lower triangle is read.
  SymMat(std::size_t order, std::initializer_list<double> full) : SymMat(order) {
    if (full.size() != order * order) throw std::invalid_argument("SymMat initializer needs order^2 values");
    auto it = full.begin();
    for (std::size_t i = 0; i < order; ++i)
      for (std::size_t j = 0; j < order; ++j, ++it)
        if (j <= i) (*this)(i, j) = *it;
  }

  static SymMat identity(std::size_t n) {
    SymMat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static constexpr std::size_t packed_size(std::size_t order) noexcept { return order * (order + 1) / 2; }
  static constexpr std::size_t packed_index(std::size_t i, std::size_t j) noexcept {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
  }

  std::size_t order() const noexcept { return order_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[packed_index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[packed_index(i, j)]; }

  const std::vector<double>& packed() const noexcept { return data_; }
  std::vector<double>& packed() noexcept { return data_; }

  Matrix full() const {
    Matrix m(order_, order_);
    for (std::size_t i = 0; i < order_; ++i)
      for (std::size_t j = 0; j < order_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  double frobenius_norm() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < order_; ++i)
      for (std::size_t j = 0; j <= i; ++j) s += (i == j ? 1.0 : 2.0) * (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }

  friend bool operator==(const SymMat&, const SymMat&) = default;

 private:
  std::size_t order_ = 0;
  std::vector<double> data_;
};

/// tr(A B) for symmetric A, B.
inline double trace_product(const SymMat& a, const SymMat& b) {
  if (a.order() != b.order()) throw std::invalid_argument("trace_product order mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.order(); ++i)
    for (std::size_t j = 0; j <= i; ++j) s += (i == j ? 1.0 : 2.0) * a(i, j) * b(i, j);
  return s;
}

struct SymEig {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

/// Cyclic Jacobi rotations until the off-diagonal mass is below 1e-12 * |M|_F.
inline SymEig sym_eig_small(const SymMat& m) {
  const std::size_t n = m.order();
  if (n > SymMat::kMaxOrder) throw std::invalid_argument("sym_eig_small: order above 64");
  Matrix a = m.full();
  Matrix v = Matrix::identity(n);
  const double target = 1e-12 * m.frobenius_norm();

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_mass() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEig out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

inline double min_eigenvalue(const SymMat& m) { return m.order() == 0 ? 0.0 : sym_eig_small(m).values.front(); }
inline double max_eigenvalue(const SymMat& m) { return m.order() == 0 ? 0.0 : sym_eig_small(m).values.back(); }

/// Lower Cholesky factor of a symmetric positive definite matrix, or none.
inline std::optional<Matrix> cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

inline std::optional<Matrix> cholesky(const SymMat& a) { return cholesky(a.full()); }

/// Solves L L^T x = b.
inline std::vector<double> cholesky_solve(const Matrix& l, std::vector<double> b) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
    b[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= l(k, i) * b[k];
    b[i] /= l(i, i);
  }
  return b;
}

/// Inverse of an SPD matrix from its Cholesky factor.
inline SymMat cholesky_inverse(const Matrix& l) {
  const std::size_t n = l.rows();
  SymMat inv(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto col = cholesky_solve(l, std::move(e));
    for (std::size_t i = j; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace nlosbound
