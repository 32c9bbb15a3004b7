#pragma once

#include <span>
#include <vector>

#include "rmflow/matrix.hpp"
#include "rmflow/spectral_function.hpp"

namespace rmflow {

template <class T>
struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  Matrix<T> eigenvectors;           // columns
};

// Hermitian tolerance used by every validating entry point.
inline constexpr double kHermitianTolerance = 1e-12;

template <class T>
double hermitian_defect(const Matrix<T>& m);

// Throws ValidationError if m is not Hermitian within tolerance or has
// non-finite entries.
template <class T>
void require_hermitian(const Matrix<T>& m, const char* where);

// Cyclic Jacobi.  Deterministic.
template <class T>
EigenDecomposition<T> eigen(const Matrix<T>& m);

// Same as eigen() but skips validation and consumes its argument.  Used by
// the stepper, where the input is Hermitian by construction.
template <class T>
EigenDecomposition<T> eigen_unchecked(Matrix<T> m);

// Eigenvalues only (ascending), same rotations without accumulating vectors.
template <class T>
std::vector<double> eigenvalues_unchecked(Matrix<T> m);

template <class T>
Matrix<T> hermitize(const Matrix<T>& m);

// H diag(values) H*
template <class T>
Matrix<T> reconstruct(const Matrix<T>& vectors, std::span<const double> values);

template <class T>
Matrix<T> apply_spectral(const SpectralFunction& f, const EigenDecomposition<T>& d);

template <class T>
Matrix<T> apply_spectral(const SpectralFunction& f, const Matrix<T>& m);

}  // namespace rmflow
