#include "rmflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "rmflow/errors.hpp"

namespace rmflow {

namespace {

constexpr int kMaxSweeps = 100;

// Unit-modulus phase of h; for reals this is the sign.
inline double phase_of(double h) { return h < 0.0 ? -1.0 : 1.0; }
inline Complex phase_of(Complex h) {
  const double a = std::abs(h);
  return a == 0.0 ? Complex(1.0) : h / a;
}

template <class T>
double off_norm2(const Matrix<T>& a) {
  double s = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += FieldTraits<T>::abs2(a(i, j));
  return s;
}

// Diagonalizes a in place.  z holds eigenvectors as ROWS (contiguous updates);
// with_vectors=false leaves z untouched.
template <class T, bool with_vectors = true>
void jacobi(Matrix<T>& a, Matrix<T>& z) {
  using F = FieldTraits<T>;
  const std::size_t n = a.size();
  if constexpr (with_vectors) z = Matrix<T>::identity(n);
  if (n < 2) return;

  double diag2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag2 += F::abs2(a(i, i));
  const double total = diag2 + 2.0 * off_norm2(a);
  if (total == 0.0) return;
  // Off-diagonal Frobenius norm <= 1e-12 ||A||_F; by Weyl this bounds the
  // eigenvalue error by the same amount, independent of gaps.
  const double stop = 1e-24 * total;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_norm2(a);
    if (off <= stop) return;
    // Early sweeps skip small pivots (threshold strategy).
    const double threshold = sweep < 3 ? 0.2 * std::sqrt(off) / static_cast<double>(n * n) : 0.0;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T h = a(p, q);
        const double habs = std::abs(h);
        if (habs == 0.0 || habs < threshold) continue;
        const double app = F::real(a(p, p));
        const double aqq = F::real(a(q, q));
        // Negligible pivot after a few sweeps: drop it.
        if (sweep > 3 && habs * 1e18 < std::fabs(app) && habs * 1e18 < std::fabs(aqq)) {
          a(p, q) = T{};
          a(q, p) = T{};
          continue;
        }
        const double theta = (aqq - app) / (2.0 * habs);
        double t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        if (theta < 0.0) t = -t;
        if (std::fabs(theta) > 1e150) t = 0.5 / theta;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const T ph = phase_of(h);
        const T phc = F::conj(ph);

        // U = diag(1, conj(ph)) R: rows p, q of a become
        //   a_p <- c a_p - s ph a_q,  a_q <- s a_p + c ph a_q
        T* rp = a.row(p);
        T* rq = a.row(q);
        const T sph = s * ph;
        const T cph = c * ph;
        auto rotate_rows = [&](std::size_t lo, std::size_t hi) {
          for (std::size_t r = lo; r < hi; ++r) {
            const T xp = rp[r];
            const T xq = rq[r];
            rp[r] = c * xp - sph * xq;
            rq[r] = s * xp + cph * xq;
          }
        };
        rotate_rows(0, p);
        rotate_rows(p + 1, q);
        rotate_rows(q + 1, n);
        for (std::size_t r = 0; r < n; ++r) {
          a(r, p) = F::conj(rp[r]);
          a(r, q) = F::conj(rq[r]);
        }
        a(p, p) = T{app - t * habs};
        a(q, q) = T{aqq + t * habs};
        a(p, q) = T{};
        a(q, p) = T{};

        if constexpr (!with_vectors) continue;
        // V <- V U, stored transposed: row p of z is column p of V.
        T* zp = z.row(p);
        T* zq = z.row(q);
        for (std::size_t r = 0; r < n; ++r) {
          const T vp = zp[r];
          const T vq = zq[r];
          zp[r] = c * vp - s * phc * vq;
          zq[r] = s * vp + c * phc * vq;
        }
      }
    }
  }
  throw NumericalError("eigen: Jacobi iteration did not converge in " +
                       std::to_string(kMaxSweeps) + " sweeps (n=" + std::to_string(n) + ")");
}

}  // namespace

template <class T>
double hermitian_defect(const Matrix<T>& m) {
  double d = 0.0;
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      d = std::max(d, std::abs(m(i, j) - FieldTraits<T>::conj(m(j, i))));
  return d;
}

template <class T>
void require_hermitian(const Matrix<T>& m, const char* where) {
  if (!m.all_finite()) throw ValidationError(std::string(where) + ": matrix has non-finite entries");
  const double defect = hermitian_defect(m);
  if (defect > kHermitianTolerance * (1.0 + m.max_abs())) {
    std::ostringstream os;
    os << where << ": matrix is not Hermitian (defect " << defect << ")";
    throw ValidationError(os.str());
  }
}

template <class T>
EigenDecomposition<T> eigen_unchecked(Matrix<T> a) {
  const std::size_t n = a.size();
  Matrix<T> z;
  jacobi(a, z);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return FieldTraits<T>::real(a(i, i)) < FieldTraits<T>::real(a(j, j));
  });

  EigenDecomposition<T> d;
  d.eigenvalues.resize(n);
  d.eigenvectors = Matrix<T>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    d.eigenvalues[k] = FieldTraits<T>::real(a(src, src));
    const T* zr = z.row(src);
    for (std::size_t r = 0; r < n; ++r) d.eigenvectors(r, k) = zr[r];
  }
  return d;
}

template <class T>
std::vector<double> eigenvalues_unchecked(Matrix<T> a) {
  Matrix<T> unused;
  jacobi<T, false>(a, unused);
  std::vector<double> ev(a.size());
  for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = FieldTraits<T>::real(a(i, i));
  std::sort(ev.begin(), ev.end());
  return ev;
}

template <class T>
EigenDecomposition<T> eigen(const Matrix<T>& m) {
  require_hermitian(m, "eigen");
  return eigen_unchecked(hermitize(m));
}

template <class T>
Matrix<T> hermitize(const Matrix<T>& m) {
  const std::size_t n = m.size();
  Matrix<T> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r(i, i) = T{FieldTraits<T>::real(m(i, i))};
    for (std::size_t j = i + 1; j < n; ++j) {
      const T v = 0.5 * (m(i, j) + FieldTraits<T>::conj(m(j, i)));
      r(i, j) = v;
      r(j, i) = FieldTraits<T>::conj(v);
    }
  }
  return r;
}

template <class T>
Matrix<T> reconstruct(const Matrix<T>& v, std::span<const double> values) {
  const std::size_t n = v.size();
  // (V D) V* computed as sum over k of values[k] v_k v_k^*; row-major friendly.
  Matrix<T> vd(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) vd(i, k) = v(i, k) * values[k];
  Matrix<T> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      T s{};
      const T* a = vd.row(i);
      const T* b = v.row(j);
      for (std::size_t k = 0; k < n; ++k) s += a[k] * FieldTraits<T>::conj(b[k]);
      r(i, j) = s;
      r(j, i) = FieldTraits<T>::conj(s);
    }
    r(i, i) = T{FieldTraits<T>::real(r(i, i))};
  }
  return r;
}

template <class T>
Matrix<T> apply_spectral(const SpectralFunction& f, const EigenDecomposition<T>& d) {
  std::vector<double> fv(d.eigenvalues.size());
  for (std::size_t i = 0; i < fv.size(); ++i) {
    fv[i] = f(d.eigenvalues[i]);
    if (!std::isfinite(fv[i])) {
      std::ostringstream os;
      os.precision(17);
      os << "apply_spectral: " << f.label() << " is not finite at eigenvalue " << d.eigenvalues[i];
      throw DomainError(os.str());
    }
  }
  return reconstruct(d.eigenvectors, fv);
}

template <class T>
Matrix<T> apply_spectral(const SpectralFunction& f, const Matrix<T>& m) {
  require_hermitian(m, "apply_spectral");
  // Affine functions act without a decomposition.
  if (f.is_affine()) {
    Matrix<T> r = hermitize(m);
    r *= f.slope();
    for (std::size_t i = 0; i < r.size(); ++i) r(i, i) += T{f.intercept()};
    return r;
  }
  return apply_spectral(f, eigen(m));
}

#define RMFLOW_INSTANTIATE(T)                                                              \
  template double hermitian_defect<T>(const Matrix<T>&);                                   \
  template void require_hermitian<T>(const Matrix<T>&, const char*);                       \
  template EigenDecomposition<T> eigen<T>(const Matrix<T>&);                               \
  template EigenDecomposition<T> eigen_unchecked<T>(Matrix<T>);                            \
  template std::vector<double> eigenvalues_unchecked<T>(Matrix<T>);                        \
  template Matrix<T> hermitize<T>(const Matrix<T>&);                                       \
  template Matrix<T> reconstruct<T>(const Matrix<T>&, std::span<const double>);            \
  template Matrix<T> apply_spectral<T>(const SpectralFunction&, const EigenDecomposition<T>&); \
  template Matrix<T> apply_spectral<T>(const SpectralFunction&, const Matrix<T>&);

RMFLOW_INSTANTIATE(double)
RMFLOW_INSTANTIATE(Complex)

#undef RMFLOW_INSTANTIATE

}  // namespace rmflow
