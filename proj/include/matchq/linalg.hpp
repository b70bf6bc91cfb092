#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "matchq/errors.hpp"

namespace matchq {

class Vector;

/// Dense real matrix, row-major. Sized for the small generator blocks this
/// library works with (typically well under 100x100), plus the occasional
/// large direct solve in the verification oracles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw DimensionError("from_rows: ragged row lengths");
      std::size_t j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  double* row_data(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_data(std::size_t i) const { return data_.data() + i * cols_; }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  /// Adds s to every diagonal entry (square only).
  Matrix& shift_diagonal(double s) {
    if (!square()) throw DimensionError("shift_diagonal: matrix not square");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, i) += s;
    return *this;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Largest absolute entry.
  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Infinity norm (max absolute row sum).
  double inf_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
      m = std::max(m, s);
    }
    return m;
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionError("matrix shapes do not match");
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Dense real vector. Used both as a row vector (probability mass per phase)
/// and as a column vector, depending on which side of a product it sits.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> vals) : data_(vals) {}

  static Vector ones(std::size_t n) { return Vector(n, 1.0); }

  std::size_t size() const { return data_.size(); }
  double& operator[](std::size_t i) { assert(i < data_.size()); return data_[i]; }
  double operator[](std::size_t i) const { assert(i < data_.size()); return data_[i]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Vector& operator+=(const Vector& o) {
    if (size() != o.size()) throw DimensionError("vector sizes do not match");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vector& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  double sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }
  double one_norm() const {
    double s = 0.0;
    for (double v : data_) s += std::abs(v);
    return s;
  }
  double inf_norm() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }
  double min() const {
    double m = data_.empty() ? 0.0 : data_[0];
    for (double v : data_) m = std::min(m, v);
    return m;
  }
  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::vector<double> data_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(Matrix a, double s) { return a *= s; }
inline Matrix operator*(double s, Matrix a) { return a *= s; }
inline Matrix operator-(Matrix a) { return a *= -1.0; }
inline Vector operator+(Vector a, const Vector& b) { return a += b; }
inline Vector operator*(Vector a, double s) { return a *= s; }
inline Vector operator*(double s, Vector a) { return a *= s; }

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row_data(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row_data(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

/// Row vector times matrix.
inline Vector operator*(const Vector& v, const Matrix& m) {
  if (v.size() != m.rows()) throw DimensionError("row-vector product: dimensions differ");
  Vector r(m.cols());
  for (std::size_t k = 0; k < m.rows(); ++k) {
    const double vk = v[k];
    if (vk == 0.0) continue;
    const double* mk = m.row_data(k);
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] += vk * mk[j];
  }
  return r;
}

/// Matrix times column vector.
inline Vector operator*(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) throw DimensionError("column-vector product: dimensions differ");
  Vector r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* mi = m.row_data(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += mi[j] * v[j];
    r[i] = s;
  }
  return r;
}

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("dot: sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Kronecker product: entry (p*rows(b)+q, r*cols(b)+s) = a(p,r)*b(q,s).
inline Matrix kron_product(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t p = 0; p < a.rows(); ++p)
    for (std::size_t r = 0; r < a.cols(); ++r) {
      const double apr = a(p, r);
      if (apr == 0.0) continue;
      for (std::size_t q = 0; q < b.rows(); ++q)
        for (std::size_t s = 0; s < b.cols(); ++s)
          c(p * b.rows() + q, r * b.cols() + s) = apr * b(q, s);
    }
  return c;
}

/// Kronecker sum of two square matrices: a (x) I + I (x) b.
inline Matrix kron_sum(const Matrix& a, const Matrix& b) {
  if (!a.square() || !b.square()) throw DimensionError("kron_sum: inputs must be square");
  Matrix c = kron_product(a, Matrix::identity(b.rows()));
  c += kron_product(Matrix::identity(a.rows()), b);
  return c;
}

namespace detail {

/// LU factorization with partial pivoting, kept for repeated solves.
class LuFactors {
 public:
  explicit LuFactors(Matrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    if (!lu_.square()) throw DimensionError("solve_linear: matrix not square");
    const std::size_t n = lu_.rows();
    const double pivot_floor = 1e-12 * lu_.inf_norm();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const double v = std::abs(lu_(i, k));
        if (v > best) { best = v; p = i; }
      }
      if (best <= pivot_floor)
        throw SingularMatrixError("singular matrix: pivot magnitude " + std::to_string(best), best);
      if (p != k) {
        std::swap_ranges(lu_.row_data(k), lu_.row_data(k) + n, lu_.row_data(p));
        std::swap(perm_[k], perm_[p]);
      }
      const double inv_piv = 1.0 / lu_(k, k);
      const double* rk = lu_.row_data(k);
      for (std::size_t i = k + 1; i < n; ++i) {
        double* ri = lu_.row_data(i);
        const double m = ri[k] * inv_piv;
        ri[k] = m;
        if (m == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
      }
    }
  }

  Vector solve(const Vector& b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw DimensionError("solve_linear: right-hand side size differs");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i) {
      const double* ri = lu_.row_data(i);
      double s = x[i];
      for (std::size_t j = 0; j < i; ++j) s -= ri[j] * x[j];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      const double* ri = lu_.row_data(i);
      double s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= ri[j] * x[j];
      x[i] = s / ri[i];
    }
    return x;
  }

  Matrix solve(const Matrix& b) const {
    const std::size_t n = lu_.rows();
    if (b.rows() != n) throw DimensionError("solve_linear: right-hand side rows differ");
    Matrix x = b;
    // permute rows
    {
      Matrix tmp(n, b.cols());
      for (std::size_t i = 0; i < n; ++i)
        std::copy(b.row_data(perm_[i]), b.row_data(perm_[i]) + b.cols(), tmp.row_data(i));
      x = std::move(tmp);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double* ri = lu_.row_data(i);
      double* xi = x.row_data(i);
      for (std::size_t j = 0; j < i; ++j) {
        const double m = ri[j];
        if (m == 0.0) continue;
        const double* xj = x.row_data(j);
        for (std::size_t c = 0; c < x.cols(); ++c) xi[c] -= m * xj[c];
      }
    }
    for (std::size_t i = n; i-- > 0;) {
      const double* ri = lu_.row_data(i);
      double* xi = x.row_data(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const double m = ri[j];
        if (m == 0.0) continue;
        const double* xj = x.row_data(j);
        for (std::size_t c = 0; c < x.cols(); ++c) xi[c] -= m * xj[c];
      }
      const double inv = 1.0 / ri[i];
      for (std::size_t c = 0; c < x.cols(); ++c) xi[c] *= inv;
    }
    return x;
  }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace detail

/// Solves a*x = b by partial-pivoting LU. Throws SingularMatrixError (with the
/// offending pivot magnitude) when a pivot falls below 1e-12 * ||a||_inf.
inline Matrix solve_linear(const Matrix& a, const Matrix& b) {
  return detail::LuFactors(a).solve(b);
}
inline Vector solve_linear(const Matrix& a, const Vector& b) {
  return detail::LuFactors(a).solve(b);
}

inline Matrix inverse(const Matrix& a) {
  return detail::LuFactors(a).solve(Matrix::identity(a.rows()));
}

/// Solves the row system x*a = b, i.e. x = b * a^{-1}.
inline Matrix solve_linear_left(const Matrix& b, const Matrix& a) {
  return detail::LuFactors(a.transposed()).solve(b.transposed()).transposed();
}
inline Vector solve_linear_left(const Vector& b, const Matrix& a) {
  return detail::LuFactors(a.transposed()).solve(b);
}

namespace detail {

/// Strong connectivity of the directed graph given by the off-diagonal
/// nonzero pattern of q.
inline bool strongly_connected(const Matrix& q) {
  const std::size_t n = q.rows();
  if (n == 0) return false;
  auto reachable = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> work;
    work.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!work.empty()) {
      const std::size_t i = work.front();
      work.pop();
      for (std::size_t j = 0; j < n; ++j) {
        const double v = transpose ? q(j, i) : q(i, j);
        if (i != j && v != 0.0 && !seen[j]) {
          seen[j] = 1;
          ++count;
          work.push(j);
        }
      }
    }
    return count == n;
  };
  return reachable(false) && reachable(true);
}

}  // namespace detail

/// Stationary distribution of an irreducible conservative generator q:
/// returns alpha with alpha*q = 0 and alpha*e = 1, computed by replacing the
/// last balance equation with the normalization row.
inline Vector stationary_vector(const Matrix& q) {
  if (!q.square()) throw DimensionError("stationary_vector: generator not square");
  const std::size_t n = q.rows();
  if (!detail::strongly_connected(q))
    throw NotIrreducibleError("stationary_vector: generator is reducible");
  Matrix a = q.transposed();
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  Vector b(n);
  b[n - 1] = 1.0;
  Vector alpha;
  try {
    alpha = solve_linear(a, b);
  } catch (const SingularMatrixError&) {
    throw NotIrreducibleError("stationary_vector: degenerate generator");
  }
  return alpha;
}

/// Action of a matrix exponential on a row vector: returns v * exp(t_mat * t),
/// for a subgenerator t_mat (row sums <= 0), via uniformization. The series is
/// cut when the remaining Poisson tail mass drops below 1e-12; large rate*time
/// products are split into segments so the leading Poisson weight stays
/// representable.
inline Vector exp_action(const Matrix& t_mat, const Vector& v, double t) {
  if (!t_mat.square() || t_mat.rows() != v.size())
    throw DimensionError("exp_action: dimensions do not match");
  if (t < 0.0) throw ConfigError("exp_action: negative time");
  if (t == 0.0) return v;
  double lambda = 0.0;
  for (std::size_t i = 0; i < t_mat.rows(); ++i)
    lambda = std::max(lambda, std::abs(t_mat(i, i)));
  if (lambda == 0.0) return v;  // zero subgenerator

  constexpr double kMaxSegmentMass = 64.0;
  const int segments = static_cast<int>(std::ceil(lambda * t / kMaxSegmentMass));
  const double tau = t / segments;
  Matrix step = t_mat;
  step *= 1.0 / lambda;
  step.shift_diagonal(1.0);

  Vector w = v;
  for (int s = 0; s < segments; ++s) {
    const double a = lambda * tau;
    double weight = std::exp(-a);
    double cumulative = weight;
    Vector term = w;
    Vector acc = term * weight;
    for (int j = 1; 1.0 - cumulative >= 1e-12; ++j) {
      term = term * step;
      weight *= a / j;
      cumulative += weight;
      Vector scaled = term * weight;
      acc += scaled;
      if (j > 16 * static_cast<int>(kMaxSegmentMass) + 1024)
        throw NonConvergentError("exp_action: series cutoff not reached");
    }
    w = std::move(acc);
  }
  return w;
}

}  // namespace matchq
