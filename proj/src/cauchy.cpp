#include "rmflow/cauchy.hpp"

#include <cmath>
#include <numbers>

#include "rmflow/errors.hpp"

namespace rmflow {

namespace {

void require_upper(cplx z, const char* who) {
  if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError(std::string(who) + ": need Im z > 0");
}

// int phi dmu for several phi at once would save passes; five are cheap enough.
struct TransformParts {
  cplx b2, g1, g2, h1, h2;  // int b/(x-z)^2, int g2/(x-z), int g2/(x-z)^2, ...
};

template <class Integrate>
cplx assemble(Integrate&& integ, cplx z, const SpectralFunction& g2, const SpectralFunction& h2,
              const SpectralFunction& b, double beta) {
  TransformParts p;
  p.b2 = integ([&](double x) { return b(x) / ((x - z) * (x - z)); });
  p.g1 = integ([&](double x) { return g2(x) / (x - z); });
  p.g2 = integ([&](double x) { return g2(x) / ((x - z) * (x - z)); });
  p.h1 = integ([&](double x) { return h2(x) / (x - z); });
  p.h2 = integ([&](double x) { return h2(x) / ((x - z) * (x - z)); });
  return -p.b2 + beta * (p.g1 * p.h2 + p.g2 * p.h1);
}

}  // namespace

cplx cauchy_transform(const EmpiricalMeasure& m, cplx z) {
  require_upper(z, "cauchy_transform");
  cplx s = 0.0;
  for (double x : m.atoms()) s += 1.0 / (x - z);
  return s / static_cast<double>(m.size());
}

cplx cauchy_transform(const LimitLaw& law, cplx z) {
  require_upper(z, "cauchy_transform");
  if (!has_cdf(law)) throw UnsupportedOperation("cauchy_transform: " + describe(law) + " has no density");
  return integrate(law, [z](double x) { return 1.0 / (x - z); });
}

cplx semicircle_transform(const Semicircle& s, cplx z) {
  require_upper(z, "semicircle_transform");
  const cplx w = z - s.center;
  if (s.variance == 0.0) return -1.0 / w;
  const cplx root = std::sqrt(w * w - 4.0 * s.variance);
  const cplx a = (-w + root) / (2.0 * s.variance), c = (-w - root) / (2.0 * s.variance);
  // the two roots multiply to 1/variance > 0, so exactly one is Herglotz
  return a.imag() > 0.0 ? a : c;
}

std::vector<double> stieltjes_invert(const std::function<cplx(cplx)>& G, const std::vector<double>& x_grid,
                                     const std::vector<double>& eps_list) {
  if (eps_list.size() < 2) throw ValidationError("stieltjes_invert: need at least two eps values");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw ValidationError("stieltjes_invert: eps must be > 0");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw ValidationError("stieltjes_invert: eps must descend");
  }
  std::vector<double> out;
  out.reserve(x_grid.size());
  const std::size_t k = eps_list.size();
  std::vector<double> p(k);
  for (double x : x_grid) {
    for (std::size_t i = 0; i < k; ++i) p[i] = G(cplx(x, eps_list[i])).imag() / std::numbers::pi;
    // Neville at eps = 0
    for (std::size_t m = 1; m < k; ++m)
      for (std::size_t i = 0; i + m < k; ++i) {
        const double ei = eps_list[i], ej = eps_list[i + m];
        p[i] = (ej * p[i] - ei * p[i + 1]) / (ej - ei);
      }
    out.push_back(p[0]);
  }
  return out;
}

cplx ct_evolution_rhs(const LimitLaw& law, cplx z, const SpectralFunction& g2, const SpectralFunction& h2,
                      const SpectralFunction& b, double beta) {
  require_upper(z, "ct_evolution_rhs");
  auto integ = [&](auto&& f) { return integrate(law, f); };
  return assemble(integ, z, g2, h2, b, beta);
}

cplx ct_evolution_rhs(const EmpiricalMeasure& m, cplx z, const SpectralFunction& g2, const SpectralFunction& h2,
                      const SpectralFunction& b, double beta) {
  require_upper(z, "ct_evolution_rhs");
  auto integ = [&](auto&& f) {
    cplx s = 0.0;
    for (double x : m.atoms()) s += f(x);
    return s / static_cast<double>(m.size());
  };
  return assemble(integ, z, g2, h2, b, beta);
}

namespace {

void require_time(double t, double sigma, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError(std::string(who) + ": t must be > 0");
  if (!std::isfinite(sigma)) throw ValidationError(std::string(who) + ": sigma must be finite");
}

}  // namespace

Semicircle free_bm_law(double theta, double sigma, double t) {
  require_time(t, sigma, "free_bm");
  return {theta * t, sigma * sigma * t};
}

cplx free_bm_transform(double theta, double sigma, double t, cplx z) {
  return semicircle_transform(free_bm_law(theta, sigma, t), z);
}

Semicircle free_ou_law(double theta, double sigma, double t) {
  require_time(t, sigma, "free_ou");
  const double v = theta == 0.0 ? sigma * sigma * t : sigma * sigma * std::expm1(2.0 * theta * t) / (2.0 * theta);
  return {0.0, v};
}

cplx free_ou_transform(double theta, double sigma, double t, cplx z) {
  return semicircle_transform(free_ou_law(theta, sigma, t), z);
}

Semicircle FreeDiffusion::law(double t) const {
  return kind == FreeCase::free_bm ? free_bm_law(theta, sigma, t) : free_ou_law(theta, sigma, t);
}

cplx FreeDiffusion::transform(double t, cplx z) const { return semicircle_transform(law(t), z); }

SpectralFunction FreeDiffusion::g2() const { return SpectralFunction::constant(std::fabs(sigma) / std::sqrt(2.0)); }
SpectralFunction FreeDiffusion::h2() const { return g2(); }
SpectralFunction FreeDiffusion::b() const {
  return kind == FreeCase::free_bm ? SpectralFunction::constant(theta) : SpectralFunction::affine(theta, 0.0);
}

double free_pde_residual(const FreeDiffusion& c, double t, cplx z, double dt) {
  if (!(dt > 0.0 && dt < t)) throw ValidationError("free_pde_residual: need 0 < dt < t");
  const cplx fd = (c.transform(t + dt, z) - c.transform(t - dt, z)) / (2.0 * dt);
  const cplx rhs = ct_evolution_rhs(LimitLaw{c.law(t)}, z, c.g2(), c.h2(), c.b(), 1.0);
  return std::abs(fd - rhs);
}

std::vector<double> laurent_moments(const std::function<cplx(cplx)>& G, double radius, std::size_t k_max,
                                    std::size_t points) {
  if (!(radius > 0.0)) throw ValidationError("laurent_moments: radius must be > 0");
  if (points < 2 * (k_max + 2)) throw ValidationError("laurent_moments: too few points");
  std::vector<cplx> acc(k_max + 1, 0.0);
  for (std::size_t j = 0; j < points; ++j) {
    const double phi = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(points);
    const cplx z = std::polar(radius, phi);
    const cplx g = z.imag() > 0.0 ? G(z) : std::conj(G(std::conj(z)));
    cplx zp = z;
    for (std::size_t k = 0; k <= k_max; ++k, zp *= z) acc[k] += g * zp;
  }
  std::vector<double> m(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) m[k] = -(acc[k] / static_cast<double>(points)).real();
  return m;
}

}  // namespace rmflow
