#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace rmflow {

template <class R>
struct QuadratureResult {
  R value{};
  double error = 0.0;
  bool converged = false;
};

namespace detail {

// Kronrod 15 / Gauss 7 abscissae and weights.
inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class R, class F>
void gk15(F& f, double a, double b, R& value, double& error) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const R fc = f(c);
  R k = fc * kWgk[7];
  R g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const R s = f(c - dx) + f(c + dx);
    k += s * kWgk[j];
    if (j % 2 == 1) g += s * kWg[j / 2];
  }
  value = k * h;
  error = std::abs((k - g) * h);
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod on [a, b]: always splits the interval
// with the largest error estimate.  R may be double or std::complex<double>.
template <class R, class F>
QuadratureResult<R> integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-13,
                                       double rel_tol = 1e-12, std::size_t max_intervals = 4000) {
  struct Piece {
    double a, b, err;
    R val;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  std::priority_queue<Piece> heap;
  Piece first{a, b, 0.0, R{}};
  detail::gk15<R>(f, a, b, first.val, first.err);
  heap.push(first);
  R total = first.val;
  double err = first.err;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && heap.size() < max_intervals) {
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // interval exhausted
      heap.push(Piece{worst.a, worst.b, 0.0, worst.val});
      err -= worst.err;
      continue;
    }
    Piece left{worst.a, mid, 0.0, R{}}, right{mid, worst.b, 0.0, R{}};
    detail::gk15<R>(f, left.a, left.b, left.val, left.err);
    detail::gk15<R>(f, right.a, right.b, right.val, right.err);
    total += left.val + right.val - worst.val;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
  }
  // re-sum to shed accumulated rounding in the running totals
  R sum{};
  double e = 0.0;
  while (!heap.empty()) {
    sum += heap.top().val;
    e += heap.top().err;
    heap.pop();
  }
  return {sum, e, e <= std::max(abs_tol, rel_tol * std::abs(sum))};
}

}  // namespace rmflow
