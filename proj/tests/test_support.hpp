#pragma once

#include <random>
#include <vector>

#include "rmflow/linalg.hpp"

namespace rmflow::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <class T>
T random_scalar(std::mt19937_64& rng);

template <>
inline double random_scalar<double>(std::mt19937_64& rng) {
  return uniform(rng, -1.0, 1.0);
}

template <>
inline Complex random_scalar<Complex>(std::mt19937_64& rng) {
  return {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
}

template <class T>
Matrix<T> random_hermitian(std::size_t n, std::mt19937_64& rng) {
  Matrix<T> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = T{uniform(rng, -1.0, 1.0)};
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = random_scalar<T>(rng);
      m(j, i) = FieldTraits<T>::conj(m(i, j));
    }
  }
  return m;
}

// Haar-ish unitary from the eigenvectors of a random Hermitian matrix.
template <class T>
Matrix<T> random_unitary(std::size_t n, std::mt19937_64& rng) {
  return eigen(random_hermitian<T>(n, rng)).eigenvectors;
}

template <class T>
double max_diff(const Matrix<T>& a, const Matrix<T>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

}  // namespace rmflow::testing
