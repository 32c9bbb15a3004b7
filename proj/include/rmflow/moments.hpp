#pragma once

#include <cstddef>
#include <vector>

#include "rmflow/polynomial.hpp"

namespace rmflow {

struct MomentSequence {
  double t = 0.0;
  std::vector<double> m;  // m_0..m_kmax

  std::size_t k_max() const { return m.empty() ? 0 : m.size() - 1; }
  double operator[](std::size_t k) const { return m.at(k); }
};

struct MomentTrajectory {
  std::vector<double> times;
  std::vector<MomentSequence> moments;  // aligned with times

  const MomentSequence& back() const { return moments.back(); }
  // Sequence at the grid time nearest to t.
  const MomentSequence& nearest(double t) const;
};

// m_k(t) as exact polynomials in t, index 0..k_max.
using MomentPolynomials = std::vector<RationalPolynomial>;

MomentSequence evaluate(const MomentPolynomials& table, double t);

// Wigner class, delta_0 start: m_k' = (beta/4) k sum_{i=0}^{k-2} m_i m_{k-2-i}.
// Even moments are Catalan(j) (beta t / 2)^j; beta=1 is the beta=2 law at time t/2.
MomentPolynomials wigner_moment_polynomials(int beta, std::size_t k_max);
MomentSequence semicircle_moments(double t, int beta, std::size_t k_max);

struct MpEdges {
  double a, b;
};
MpEdges mp_params(double alpha);

// Wishart class, delta_0 start:
//   m_k = alpha k int m_{k-1} + beta k sum_{i=0}^{k-2} int m_{i+1} m_{k-2-i}.
// alpha and beta enter as exact rationals.
MomentPolynomials mp_moment_polynomials(double alpha, double beta, std::size_t k_max);
MomentSequence mp_moments(double alpha, double beta, double t, std::size_t k_max);

// w_1..w_kmax (index 0 holds w_0 = 1):  w_k' = k sum_{i=0}^{k-2} w_{i+1} w_{k-1-i}, w_k(0) = 1.
MomentPolynomials geometric_w(std::size_t k_max);
// k! 9^{k-1} (1+x)^{k-1}
double geometric_w_bound(std::size_t k, double x);
// a^k w_k(t beta) e^{k alpha t}; throws NumericalError if a w_k violates its bound.
MomentSequence geometric_moments(double a, double alpha, double beta, double t, std::size_t k_max);

// RK4 on the moment hierarchy of the limit equation for polynomial b, g^2, h^2
// (ascending coefficient arrays).  initial holds m_0..m_kmax of mu_0.
MomentTrajectory generic_moment_ode(const std::vector<double>& b, const std::vector<double>& g2,
                                    const std::vector<double>& h2, double beta,
                                    const std::vector<double>& initial, std::size_t k_max,
                                    double t_final, double dt = 1e-3);

// Jacobi class with drift p - (p+q) x, g^2 = x, h^2 = 1 - x, start delta_a.
MomentTrajectory jacobi_moments(double p, double q, double beta, double a, double t_final,
                                double dt, std::size_t k_max);

// Moment matrix [m_{i+j}] of the largest square that fits is PSD within
// tol * max(1, largest eigenvalue).
bool hankel_psd(const MomentSequence& s, double tol = 1e-8);

}  // namespace rmflow
