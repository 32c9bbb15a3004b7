#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rmflow/moments.hpp"

namespace rmflow {

struct PointMass {
  double location = 0.0;
};

// Centered at `center`, radius 2 sqrt(variance).
struct Semicircle {
  double center = 0.0;
  double variance = 1.0;
};

// Solution at time t of the Wishart limit equation (b = alpha, g^2 = x,
// h^2 = 1, delta_0 start) with Dyson index beta.  The paper's density
// nu_t^MP(alpha) is the beta = 1 solution; other beta are the time-rescaled
// law nu_{beta t}^MP(alpha / beta).
struct MarchenkoPastur {
  double alpha = 1.0;
  double t = 1.0;
  int beta = 1;
};

// lambda MP^+(1) at time lambda t plus lambda* MP^-(1) at time lambda* t,
// lambda = (1+alpha)/2.  Solves the Wishart equation with G = |x| + |y|,
// beta = 1, drift alpha.
struct MpMixtureTwo {
  double alpha = 0.0;
  double t = 1.0;
};

// lambda MP^+(alpha+) at lambda t, gamma delta_0, lambda* MP^-(alpha-) at
// lambda* t.  beta = 1; the drift it solves for is induced_alpha.
struct MpMixtureThree {
  double alpha_plus = 2.0;
  double alpha_minus = 2.0;
  double t = 1.0;
};

// Moments only.
struct GeometricLaw {
  double a = 1.0;
  double alpha = 0.0;
  int beta = 2;
  double t = 1.0;
};

// Moments only; drift p - (p+q) x.
struct JacobiLaw {
  double p = 1.0;
  double q = 1.0;
  int beta = 2;
  double a = 0.5;
  double t = 1.0;
};

using LimitLaw =
    std::variant<PointMass, Semicircle, MarchenkoPastur, MpMixtureTwo, MpMixtureThree, GeometricLaw, JacobiLaw>;

struct Atom {
  double location;
  double mass;
};

struct MixtureWeights {
  double lambda;
  double lambda_star;
  double gamma;
  double induced_alpha;
};

// Wigner-class law at time t: variance beta t / 2.
Semicircle semicircle_law(double t, int beta);

LimitLaw mp_mixture_two(double alpha, double t);
LimitLaw mp_mixture_three(double alpha_plus, double alpha_minus, double t);
MixtureWeights mixture_weights(const MpMixtureTwo& law);
MixtureWeights mixture_weights(const MpMixtureThree& law);

void validate(const LimitLaw& law);
std::string describe(const LimitLaw& law);

bool has_cdf(const LimitLaw& law);
double cdf(const LimitLaw& law, double x);
double cdf_left(const LimitLaw& law, double x);  // F(x-)
double density(const LimitLaw& law, double x);   // absolutely continuous part
std::vector<Atom> atoms(const LimitLaw& law);
std::pair<double, double> support(const LimitLaw& law);
// inf{x : F(x) >= u}, u in (0, 1)
double quantile(const LimitLaw& law, double u);
// quantiles at (i + 1/2) / count
std::vector<double> quantile_atoms(const LimitLaw& law, std::size_t count);

// Moments m_0..m_kmax.  Exact for the Wigner and Wishart families, RK4 for
// Jacobi.
MomentSequence law_moments(const LimitLaw& law, std::size_t k_max);

// int phi dmu: atom sums plus adaptive quadrature of the density after an
// edge-regularizing angle substitution.
std::complex<double> integrate(const LimitLaw& law, const std::function<std::complex<double>(double)>& phi);

// Mass of the absolutely continuous part, by the same quadrature.
double continuous_mass(const LimitLaw& law);

}  // namespace rmflow
