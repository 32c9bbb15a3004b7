#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "rmflow/empirical.hpp"
#include "rmflow/limit_law.hpp"
#include "rmflow/spectral_function.hpp"

namespace rmflow {

using cplx = std::complex<double>;

// G(z) = int (x - z)^{-1} mu(dx), so G(z) ~ -1/z.  Im z must be > 0.
cplx cauchy_transform(const EmpiricalMeasure& m, cplx z);
cplx cauchy_transform(const LimitLaw& law, cplx z);

// Closed form for a semicircle; the square root is picked so Im G > 0.
cplx semicircle_transform(const Semicircle& s, cplx z);

// (1/pi) Im G(x + i eps) for each eps, extrapolated to eps = 0 by Neville's
// scheme.  eps_list strictly descending, at least two entries.
std::vector<double> stieltjes_invert(const std::function<cplx(cplx)>& G, const std::vector<double>& x_grid,
                                     const std::vector<double>& eps_list);

// d/dt G_t(z) from the limit equation with f = 1/(x - z):
//   -int b/(x-z)^2 + beta [ int g2/(x-z) int h2/(y-z)^2 + int g2/(x-z)^2 int h2/(y-z) ].
// beta = 1 is the form printed for the Cauchy transform evolution.
cplx ct_evolution_rhs(const LimitLaw& law, cplx z, const SpectralFunction& g2, const SpectralFunction& h2,
                      const SpectralFunction& b, double beta = 1.0);
cplx ct_evolution_rhs(const EmpiricalMeasure& m, cplx z, const SpectralFunction& g2, const SpectralFunction& h2,
                      const SpectralFunction& b, double beta = 1.0);

// Free Brownian motion with drift theta: semicircle, center theta t,
// variance sigma^2 t.
Semicircle free_bm_law(double theta, double sigma, double t);
cplx free_bm_transform(double theta, double sigma, double t, cplx z);

// Free OU with b(x) = theta x from 0: centered semicircle of radius^2
// 2 sigma^2 (e^{2 theta t} - 1) / theta, i.e. variance sigma^2 expm1(2 theta t) / (2 theta).
// theta = 0 is free BM.
Semicircle free_ou_law(double theta, double sigma, double t);
cplx free_ou_transform(double theta, double sigma, double t, cplx z);

enum class FreeCase { free_bm, free_ou };

struct FreeDiffusion {
  FreeCase kind = FreeCase::free_bm;
  double theta = 0.0;
  double sigma = 1.0;

  Semicircle law(double t) const;
  cplx transform(double t, cplx z) const;
  // Coefficients under which the Cauchy evolution (beta = 1) holds:
  // g^2 = h^2 = |sigma| / sqrt 2, so 2 g^2 h^2 = sigma^2; b = theta (BM) or
  // theta x (OU).
  SpectralFunction g2() const;
  SpectralFunction h2() const;
  SpectralFunction b() const;
};

// |central difference of the closed-form transform in t - ct_evolution_rhs on
// the closed-form law|, the rhs evaluated by quadrature.
double free_pde_residual(const FreeDiffusion& c, double t, cplx z, double dt);

// m_0..m_kmax from G on the circle |z| = radius: upper-half samples, lower half
// by G(conj z) = conj G(z), then trapezoid on m_k = -(1/2 pi i) oint G z^k dz.
std::vector<double> laurent_moments(const std::function<cplx(cplx)>& G, double radius, std::size_t k_max,
                                    std::size_t points = 256);

}  // namespace rmflow
