#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rmflow {

using Complex = std::complex<double>;

// Dyson index of the field: 1 for real symmetric, 2 for complex Hermitian.
template <class T>
struct FieldTraits;

template <>
struct FieldTraits<double> {
  static constexpr int beta = 1;
  static double conj(double x) { return x; }
  static double abs2(double x) { return x * x; }
  static double real(double x) { return x; }
};

template <>
struct FieldTraits<Complex> {
  static constexpr int beta = 2;
  static Complex conj(Complex x) { return std::conj(x); }
  static double abs2(Complex x) { return std::norm(x); }
  static double real(Complex x) { return x.real(); }
};

// Dense square matrix, row-major.
template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  explicit Matrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = T{d[i]};
    return m;
  }

  std::size_t size() const { return n_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  T* row(std::size_t i) { return data_.data() + i * n_; }
  const T* row(std::size_t i) const { return data_.data() + i * n_; }

  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  Matrix adjoint() const {
    Matrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r(j, i) = FieldTraits<T>::conj((*this)(i, j));
    return r;
  }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.n_;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
      T* ci = c.row(i);
      const T* ai = a.row(i);
      for (std::size_t k = 0; k < n; ++k) {
        const T aik = ai[k];
        if (aik == T{}) continue;
        const T* bk = b.row(k);
        for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
      }
    }
    return c;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) {
      return std::isfinite(std::abs(x));
    });
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

}  // namespace rmflow
