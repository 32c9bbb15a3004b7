#include "rmflow/sympoly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rmflow/errors.hpp"

namespace rmflow {

std::vector<double> elementary_symmetric(std::span<const double> lambda) {
  std::vector<double> e(lambda.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (std::size_t k = i + 1; k >= 1; --k) e[k] += lambda[i] * e[k - 1];
  return e;
}

std::vector<double> power_sums(std::span<const double> lambda, std::size_t k_max) {
  std::vector<double> p(k_max, 0.0);
  for (double x : lambda) {
    double xk = 1.0;
    for (std::size_t k = 0; k < k_max; ++k) {
      xk *= x;
      p[k] += xk;
    }
  }
  return p;
}

double newton_residual(std::span<const double> e, std::span<const double> p, std::size_t k) {
  if (k == 0 || k > p.size()) throw ValidationError("newton_residual: k out of range of p");
  if (k >= e.size()) throw ValidationError("newton_residual: k exceeds n");
  double rhs = 0.0;
  for (std::size_t i = 1; i < k; ++i) rhs += ((i % 2 == 1) ? 1.0 : -1.0) * e[i] * p[k - i - 1];
  rhs += ((k % 2 == 1) ? 1.0 : -1.0) * static_cast<double>(k) * e[k];
  const double pk = p[k - 1];
  return std::fabs(pk - rhs) / (1.0 + std::fabs(pk));
}

double pairwise_drift_identity_residual(std::span<const double> lambda, const SpectralFunction& g,
                                        const SpectralFunction& h, std::size_t k) {
  if (k < 2) throw ValidationError("pairwise_drift_identity_residual: k must be >= 2");
  const std::size_t n = lambda.size();
  std::vector<double> g2(n), h2(n);
  for (std::size_t i = 0; i < n; ++i) {
    g2[i] = g(lambda[i]) * g(lambda[i]);
    h2[i] = h(lambda[i]) * h(lambda[i]);
  }
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = lambda[i] - lambda[j];
      if (d == 0.0) {
        std::ostringstream os;
        os << "pairwise_drift_identity_residual: coincident eigenvalues " << lambda[i];
        throw ValidationError(os.str());
      }
      inner += (g2[i] * h2[j] + g2[j] * h2[i]) / d;
    }
    lhs += std::pow(lambda[i], static_cast<double>(k - 1)) * inner;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sym = 0.0;
      for (std::size_t l = 0; l + 2 <= k; ++l)
        sym += std::pow(lambda[i], static_cast<double>(l)) *
               std::pow(lambda[j], static_cast<double>(k - 2 - l));
      rhs += sym * (g2[i] * h2[j] + g2[j] * h2[i]);
    }
  }
  return std::fabs(lhs - rhs) / (1.0 + std::fabs(rhs));
}

double incomplete_elementary_symmetric(std::span<const double> lambda, std::size_t m,
                                       std::span<const std::size_t> skip) {
  std::vector<double> rest;
  rest.reserve(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i)
    if (std::find(skip.begin(), skip.end(), i) == skip.end()) rest.push_back(lambda[i]);
  if (m > rest.size()) return 0.0;
  return elementary_symmetric(rest)[m];
}

double log_det_drift(std::span<const double> lambda, const SpectralFunction& g,
                     const SpectralFunction& h, const SpectralFunction& b, int beta) {
  const std::size_t n = lambda.size();
  if (n == 0) throw ValidationError("log_det_drift: empty spectrum");
  for (double x : lambda) {
    if (!(x > 0.0)) {
      std::ostringstream os;
      os << "log_det_drift: eigenvalue " << x << " is not positive";
      throw DomainError(os.str());
    }
  }
  const double nf = static_cast<double>(n);
  const double en = elementary_symmetric(lambda)[n];

  std::vector<double> e1(n);  // e_{n-1} with lambda_i removed
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t skip[1] = {i};
    e1[i] = incomplete_elementary_symmetric(lambda, n - 1, skip);
  }

  double quad = 0.0, drift = 0.0, pair = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = g(lambda[i]), hi = h(lambda[i]);
    quad += gi * gi * hi * hi * e1[i] * e1[i];
    drift += b(lambda[i]) * e1[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gi = g(lambda[i]), hi = h(lambda[i]);
      const double gj = g(lambda[j]), hj = h(lambda[j]);
      const double G = gi * gi * hj * hj + gj * gj * hi * hi;
      const std::size_t skip[2] = {i, j};
      pair += G * incomplete_elementary_symmetric(lambda, n - 2, skip);
    }
  }
  return -2.0 * quad / (nf * en * en) + (drift - static_cast<double>(beta) * pair) / (nf * en);
}

}  // namespace rmflow
