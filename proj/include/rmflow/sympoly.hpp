#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rmflow/spectral_function.hpp"

namespace rmflow {

// e_0..e_n by the prefix recurrence e_k <- e_k + x e_{k-1}.
std::vector<double> elementary_symmetric(std::span<const double> lambda);

// p_1..p_K (index 0 holds p_1).
std::vector<double> power_sums(std::span<const double> lambda, std::size_t k_max);

// |p_k - sum_{i<k} (-1)^{i-1} e_i p_{k-i} - (-1)^{k-1} k e_k| / (1 + |p_k|).
// e is e_0..e_n, p is p_1..p_K.
double newton_residual(std::span<const double> e, std::span<const double> p, std::size_t k);

// Relative gap between
//   sum_i lambda_i^{k-1} sum_{j!=i} G(l_i, l_j) / (l_i - l_j)
// and
//   sum_{i<j} (sum_{l=0}^{k-2} l_i^l l_j^{k-2-l}) G(l_i, l_j),
// G(x,y) = g^2(x) h^2(y) + g^2(y) h^2(x).  lambda must be pairwise distinct.
double pairwise_drift_identity_residual(std::span<const double> lambda, const SpectralFunction& g,
                                        const SpectralFunction& h, std::size_t k);

// e_m of lambda with the entries at the given positions removed.
double incomplete_elementary_symmetric(std::span<const double> lambda, std::size_t m,
                                       std::span<const std::size_t> skip);

// Finite-variation coefficient of V_n = log e_n for the flow with
// coefficients g, h, b (b is b_n, unscaled) at the spectrum lambda > 0.
// The dimension n is lambda.size().
double log_det_drift(std::span<const double> lambda, const SpectralFunction& g,
                     const SpectralFunction& h, const SpectralFunction& b, int beta);

}  // namespace rmflow
