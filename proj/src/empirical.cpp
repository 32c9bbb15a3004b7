#include "rmflow/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "rmflow/errors.hpp"

namespace rmflow {

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw ValidationError("EmpiricalMeasure: needs at least one atom");
  for (double x : atoms_)
    if (!std::isfinite(x)) throw ValidationError("EmpiricalMeasure: atoms must be finite");
  std::sort(atoms_.begin(), atoms_.end());
}

EmpiricalMeasureProcess EmpiricalMeasureProcess::from_path(const EigenPath& path) {
  EmpiricalMeasureProcess p;
  p.t_grid = path.t_grid;
  p.measures.reserve(path.spectra.size());
  for (const auto& s : path.spectra) p.measures.emplace_back(s);
  p.validate();
  return p;
}

void EmpiricalMeasureProcess::validate() const {
  if (t_grid.empty()) throw ValidationError("EmpiricalMeasureProcess: empty grid");
  if (t_grid.size() != measures.size()) throw ValidationError("EmpiricalMeasureProcess: grid/measure count mismatch");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw ValidationError("EmpiricalMeasureProcess: grid must be ascending");
  for (const auto& m : measures)
    if (m.size() != measures.front().size() || m.size() == 0)
      throw ValidationError("EmpiricalMeasureProcess: measures must share a nonzero atom count");
}

double moment(const EmpiricalMeasure& m, std::size_t k) {
  if (k == 0) return 1.0;
  double s = 0.0;
  for (double x : m.atoms()) s += std::pow(x, static_cast<double>(k));
  return s / static_cast<double>(m.size());
}

double cdf(const EmpiricalMeasure& m, double x) {
  const auto& a = m.atoms();
  return static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin()) / static_cast<double>(a.size());
}

double cdf_left(const EmpiricalMeasure& m, double x) {
  const auto& a = m.atoms();
  return static_cast<double>(std::lower_bound(a.begin(), a.end(), x) - a.begin()) / static_cast<double>(a.size());
}

namespace {

void require_cdf(const LimitLaw& law, const char* who) {
  if (!has_cdf(law)) throw UnsupportedOperation(std::string(who) + ": " + describe(law) + " exposes no CDF");
}

}  // namespace

double ks_distance(const EmpiricalMeasure& m, const LimitLaw& law) {
  require_cdf(law, "ks_distance");
  const auto& a = m.atoms();
  const double n = static_cast<double>(a.size());
  double worst = 0.0;
  std::size_t i = 0;
  while (i < a.size()) {
    std::size_t j = i;
    while (j < a.size() && a[j] == a[i]) ++j;
    // F_emp jumps from i/n to j/n at a[i]; between atoms both sides are
    // monotone, so the one-sided limits here bound the sup
    worst = std::max(worst, std::fabs(static_cast<double>(i) / n - rmflow::cdf_left(law, a[i])));
    worst = std::max(worst, std::fabs(static_cast<double>(j) / n - rmflow::cdf(law, a[i])));
    i = j;
  }
  return worst;
}

double wasserstein1(const EmpiricalMeasure& m, const LimitLaw& law) {
  require_cdf(law, "wasserstein1");
  constexpr int kCells = 4000;
  const auto [law_lo, law_hi] = support(law);
  const double lo = std::min(law_lo, m.atoms().front()), hi = std::max(law_hi, m.atoms().back());
  if (!(hi > lo)) return 0.0;
  std::vector<double> nodes;
  nodes.reserve(kCells + 1 + m.size());
  for (int i = 0; i <= kCells; ++i) nodes.push_back(lo + (hi - lo) * i / kCells);
  nodes.back() = hi;
  nodes.insert(nodes.end(), m.atoms().begin(), m.atoms().end());
  for (const auto& at : atoms(law)) nodes.push_back(at.location);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double u = nodes[i], v = nodes[i + 1], h = v - u;
    const double c = cdf(m, u);
    const double d1 = rmflow::cdf(law, u) - c, d2 = rmflow::cdf_left(law, v) - c;
    if (d1 * d2 >= 0.0)
      total += 0.5 * h * (std::fabs(d1) + std::fabs(d2));
    else
      total += 0.5 * h * (d1 * d1 + d2 * d2) / (std::fabs(d1) + std::fabs(d2));
  }
  return total;
}

namespace {

struct DriftTerms {
  double drift = 0.0;        // <b f'>
  double correction = 0.0;   // <f'' G(x,x)> = <2 f'' g2 h2>
  double interaction = 0.0;  // <<K_f G>>
};

// K_f(x,y) = sum_m c_m sum_{l<m} x^l y^{m-1-l} for f' = sum_m c_m x^m, so the
// double sum factorizes into A_l = <g2 x^l> and B_l = <h2 x^l>.
DriftTerms drift_terms(const EmpiricalMeasure& mu, const Polynomial& fp, const Polynomial& fpp,
                       const SpectralFunction& g2, const SpectralFunction& h2, const SpectralFunction& b) {
  DriftTerms d;
  const int deg = fp.degree();
  const std::size_t L = deg >= 1 ? static_cast<std::size_t>(deg) : 0;
  std::vector<double> A(L, 0.0), B(L, 0.0);
  for (double x : mu.atoms()) {
    const double gx = g2(x), hx = h2(x);
    d.drift += b(x) * fp(x);
    d.correction += 2.0 * fpp(x) * gx * hx;
    double p = 1.0;
    for (std::size_t l = 0; l < L; ++l, p *= x) {
      A[l] += gx * p;
      B[l] += hx * p;
    }
  }
  const double n = static_cast<double>(mu.size());
  d.drift /= n;
  d.correction /= n;
  for (std::size_t l = 0; l < L; ++l) A[l] /= n, B[l] /= n;
  for (std::size_t m = 1; m <= L; ++m) {
    double s = 0.0;
    for (std::size_t l = 0; l < m; ++l) s += A[l] * B[m - 1 - l];
    d.interaction += 2.0 * fp.coefficient(m) * s;
  }
  return d;
}

double mean_of(const EmpiricalMeasure& mu, const Polynomial& f) {
  double s = 0.0;
  for (double x : mu.atoms()) s += f(x);
  return s / static_cast<double>(mu.size());
}

// cumulative trapezoid, starting at 0
std::vector<double> cumulative(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (y[i - 1] + y[i]);
  return out;
}

}  // namespace

std::vector<double> limit_equation_residuals(const EmpiricalMeasureProcess& proc, const Polynomial& f,
                                             const SpectralFunction& g2, const SpectralFunction& h2,
                                             const SpectralFunction& b, double beta) {
  proc.validate();
  if (f.degree() > 12) throw ValidationError("limit_equation_residual: f must have degree <= 12");
  const Polynomial fp = f.derivative(), fpp = fp.derivative();
  std::vector<double> rate(proc.t_grid.size());
  for (std::size_t i = 0; i < rate.size(); ++i) {
    const auto d = drift_terms(proc.measures[i], fp, fpp, g2, h2, b);
    rate[i] = d.drift + 0.5 * beta * d.interaction;
  }
  const auto integral = cumulative(proc.t_grid, rate);
  const double f0 = mean_of(proc.measures.front(), f);
  std::vector<double> res(rate.size());
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = mean_of(proc.measures[i], f) - f0 - integral[i];
  return res;
}

double limit_equation_residual(const EmpiricalMeasureProcess& proc, const Polynomial& f,
                               const SpectralFunction& g2, const SpectralFunction& h2,
                               const SpectralFunction& b, double beta) {
  double worst = 0.0;
  for (double r : limit_equation_residuals(proc, f, g2, h2, b, beta)) worst = std::max(worst, std::fabs(r));
  return worst;
}

EmDecomposition em_sde_decomposition(const EmpiricalMeasureProcess& proc, const Polynomial& f,
                                     const FlowSpec& spec) {
  proc.validate();
  if (spec.scaling != TimeScaling::scaled)
    throw UnsupportedOperation("em_sde_decomposition: only the scaled time convention is supported");
  if (spec.n == 0 || proc.measures.front().size() != spec.n)
    throw ValidationError("em_sde_decomposition: spec.n must match the atom count");
  const double n = static_cast<double>(spec.n), beta = spec.beta;
  const SpectralFunction g2 = spec.g.squared(), h2 = spec.h.squared();
  const SpectralFunction b = spec.drift_prescaled ? spec.b : spec.b.scaled(1.0 / n);
  const Polynomial fp = f.derivative(), fpp = fp.derivative();

  const std::size_t T = proc.t_grid.size();
  std::vector<double> dr(T), co(T), in(T);
  for (std::size_t i = 0; i < T; ++i) {
    const auto d = drift_terms(proc.measures[i], fp, fpp, g2, h2, b);
    dr[i] = d.drift;
    co[i] = (2.0 - beta) / (2.0 * n) * d.correction;
    in[i] = 0.5 * beta * d.interaction;
  }
  EmDecomposition out;
  out.t_grid = proc.t_grid;
  out.drift = cumulative(proc.t_grid, dr);
  out.correction = cumulative(proc.t_grid, co);
  out.interaction = cumulative(proc.t_grid, in);
  const double f0 = mean_of(proc.measures.front(), f);
  out.increment.resize(T);
  out.martingale.resize(T);
  for (std::size_t i = 0; i < T; ++i) {
    out.increment[i] = mean_of(proc.measures[i], f) - f0;
    out.martingale[i] = out.increment[i] - out.drift[i] - out.correction[i] - out.interaction[i];
  }
  return out;
}

}  // namespace rmflow
