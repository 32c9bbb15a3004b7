#pragma once

#include <vector>

#include "rmflow/flow_sim.hpp"
#include "rmflow/limit_law.hpp"
#include "rmflow/polynomial.hpp"
#include "rmflow/spectral_function.hpp"

namespace rmflow {

// Uniform measure on the given atoms (sorted on construction).
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(std::vector<double> atoms);

  const std::vector<double>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<double> atoms_;
};

struct EmpiricalMeasureProcess {
  std::vector<double> t_grid;
  std::vector<EmpiricalMeasure> measures;

  static EmpiricalMeasureProcess from_path(const EigenPath& path);
  void validate() const;
};

double moment(const EmpiricalMeasure& m, std::size_t k);
double cdf(const EmpiricalMeasure& m, double x);
double cdf_left(const EmpiricalMeasure& m, double x);

// sup |F_emp - F_law|, exact: both one-sided limits at every atom.
double ks_distance(const EmpiricalMeasure& m, const LimitLaw& law);
// int |F_emp - F_law| dx on a 4000-cell grid over the union support refined
// at every atom; F_law is linear within a cell, F_emp constant.
double wasserstein1(const EmpiricalMeasure& m, const LimitLaw& law);

// LHS - RHS of the limit equation for test function f at each grid time:
//   <mu_t,f> - <mu_0,f> - int_0^t [ <b f', mu_s> + (beta/2) <<K_f G, mu_s x mu_s>> ] ds
// with K_f(x,y) = (f'(x)-f'(y))/(x-y), K_f(x,x) = f''(x), G = g2(x)h2(y) + g2(y)h2(x).
// Atom sums are exact; time integral is trapezoid on proc.t_grid.
std::vector<double> limit_equation_residuals(const EmpiricalMeasureProcess& proc, const Polynomial& f,
                                             const SpectralFunction& g2, const SpectralFunction& h2,
                                             const SpectralFunction& b, double beta);
// max over grid times of |residual|
double limit_equation_residual(const EmpiricalMeasureProcess& proc, const Polynomial& f,
                               const SpectralFunction& g2, const SpectralFunction& h2,
                               const SpectralFunction& b, double beta);

// Terms of the finite-n semimartingale decomposition of <mu_t^(n), f>, each
// time-integrated from 0 to every grid time.  The martingale part is what
// remains after subtracting the three drift terms from the observed increment.
struct EmDecomposition {
  std::vector<double> t_grid;
  std::vector<double> increment;    // <mu_t,f> - <mu_0,f>
  std::vector<double> drift;        // int <f' b_n/n, mu_s> ds
  std::vector<double> correction;   // (2-beta)/(2n) int <f'' G_n(x,x), mu_s> ds
  std::vector<double> interaction;  // (beta/2) int <<K_f G_n, mu_s x mu_s>> ds
  std::vector<double> martingale;   // remainder
};

// Uses spec.g, spec.h, spec.b, spec.beta, spec.n.  Scaled time only.
EmDecomposition em_sde_decomposition(const EmpiricalMeasureProcess& proc, const Polynomial& f,
                                     const FlowSpec& spec);

}  // namespace rmflow
