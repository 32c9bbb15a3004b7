#include "rmflow/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rmflow/errors.hpp"
#include "rmflow/quadrature.hpp"

namespace rmflow {

namespace {

constexpr double kPi = std::numbers::pi;

// weight * nu^MP_scale(ratio) (beta = 1 density), possibly reflected to x <= 0.
// Only the continuous part; atoms are carried separately.
struct MpPiece {
  double weight, ratio, scale;
  bool reflected;

  double root() const { return std::sqrt(ratio); }
  double lower() const { return scale * (1.0 - root()) * (1.0 - root()); }
  double upper() const { return scale * (1.0 + root()) * (1.0 + root()); }
  double mid() const { return scale * (1.0 + ratio); }
  double radius() const { return 2.0 * scale * root(); }
  double mass() const { return std::min(1.0, ratio); }  // unweighted continuous mass

  // Unweighted continuous CDF of the unreflected piece at y >= 0.
  double cont_cdf(double y) const {
    const double a = lower(), b = upper();
    if (y <= a) return 0.0;
    if (y >= b) return mass();
    const double m = mid(), r = radius(), d = scale * std::fabs(1.0 - ratio);
    const double th = std::acos(std::clamp((m - y) / r, -1.0, 1.0));
    double c = r * std::sin(th) + m * th;
    if (d > 0.0) {
      const double k = (1.0 + root()) / std::fabs(1.0 - root());
      c -= 2.0 * d * std::atan(k * std::tan(0.5 * th));
    }
    return std::clamp(c / (2.0 * kPi * scale), 0.0, mass());
  }

  double cont_density(double y) const {
    const double a = lower(), b = upper();
    if (!(y > a && y < b) || y <= 0.0) return 0.0;
    return std::sqrt((y - a) * (b - y)) / (2.0 * kPi * scale * y);
  }

  double cdf(double x) const {
    if (!reflected) return weight * cont_cdf(x);
    return weight * (mass() - cont_cdf(-x));
  }
  double density(double x) const { return weight * cont_density(reflected ? -x : x); }
};

struct SemicirclePiece {
  double weight, center, variance;

  double radius() const { return 2.0 * std::sqrt(variance); }
  double cdf(double x) const {
    const double r = radius(), y = x - center;
    if (y <= -r) return 0.0;
    if (y >= r) return weight;
    const double u = y / r;
    return weight * std::clamp(0.5 + (u * std::sqrt(1.0 - u * u) + std::asin(u)) / kPi, 0.0, 1.0);
  }
  double density(double x) const {
    const double r = radius(), y = x - center;
    if (!(std::fabs(y) < r)) return 0.0;
    return weight * 2.0 * std::sqrt(r * r - y * y) / (kPi * r * r);
  }
};

struct Decomposed {
  std::vector<Atom> atoms;  // sorted, merged
  std::vector<MpPiece> mp;
  std::vector<SemicirclePiece> sc;
};

void add_atom(Decomposed& d, double loc, double mass) {
  if (mass <= 0.0) return;
  for (auto& a : d.atoms)
    if (a.location == loc) {
      a.mass += mass;
      return;
    }
  d.atoms.push_back({loc, mass});
}

void add_mp(Decomposed& d, double weight, double ratio, double scale, bool reflected) {
  if (weight <= 0.0) return;
  if (ratio <= 0.0 || scale <= 0.0) {
    add_atom(d, 0.0, weight);
    return;
  }
  if (ratio < 1.0) add_atom(d, 0.0, weight * (1.0 - ratio));
  d.mp.push_back({weight, ratio, scale, reflected});
}

bool moment_only(const LimitLaw& law) {
  return std::holds_alternative<GeometricLaw>(law) || std::holds_alternative<JacobiLaw>(law);
}

Decomposed decompose(const LimitLaw& law) {
  validate(law);
  if (moment_only(law)) throw UnsupportedOperation(describe(law) + " is moment-only (no CDF or density)");
  Decomposed d;
  if (const auto* p = std::get_if<PointMass>(&law)) {
    add_atom(d, p->location, 1.0);
  } else if (const auto* s = std::get_if<Semicircle>(&law)) {
    if (s->variance == 0.0)
      add_atom(d, s->center, 1.0);
    else
      d.sc.push_back({1.0, s->center, s->variance});
  } else if (const auto* m = std::get_if<MarchenkoPastur>(&law)) {
    add_mp(d, 1.0, m->alpha / m->beta, m->beta * m->t, false);
  } else if (const auto* two = std::get_if<MpMixtureTwo>(&law)) {
    const auto w = mixture_weights(*two);
    add_mp(d, w.lambda, 1.0, w.lambda * two->t, false);
    add_mp(d, w.lambda_star, 1.0, w.lambda_star * two->t, true);
  } else if (const auto* three = std::get_if<MpMixtureThree>(&law)) {
    const auto w = mixture_weights(*three);
    add_mp(d, w.lambda, three->alpha_plus, w.lambda * three->t, false);
    add_atom(d, 0.0, w.gamma);
    add_mp(d, w.lambda_star, three->alpha_minus, w.lambda_star * three->t, true);
  }
  std::sort(d.atoms.begin(), d.atoms.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
  return d;
}

double cdf_of(const Decomposed& d, double x, bool left) {
  double f = 0.0;
  for (const auto& a : d.atoms)
    if (a.location < x || (!left && a.location == x)) f += a.mass;
  for (const auto& p : d.mp) f += p.cdf(x);
  for (const auto& s : d.sc) f += s.cdf(x);
  return std::clamp(f, 0.0, 1.0);
}

double density_of(const Decomposed& d, double x) {
  double f = 0.0;
  for (const auto& p : d.mp) f += p.density(x);
  for (const auto& s : d.sc) f += s.density(x);
  return f;
}

std::pair<double, double> support_of(const Decomposed& d) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& a : d.atoms) lo = std::min(lo, a.location), hi = std::max(hi, a.location);
  for (const auto& p : d.mp) {
    const double a = p.reflected ? -p.upper() : p.lower(), b = p.reflected ? -p.lower() : p.upper();
    lo = std::min(lo, a), hi = std::max(hi, b);
  }
  for (const auto& s : d.sc) lo = std::min(lo, s.center - s.radius()), hi = std::max(hi, s.center + s.radius());
  return {lo, hi};
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

void check_beta(int beta, const char* who) { require(beta == 1 || beta == 2, std::string(who) + ": beta must be 1 or 2"); }

}  // namespace

Semicircle semicircle_law(double t, int beta) {
  check_beta(beta, "semicircle_law");
  require(finite_nonneg(t), "semicircle_law: t must be finite and >= 0");
  return {0.0, 0.5 * beta * t};
}

LimitLaw mp_mixture_two(double alpha, double t) {
  LimitLaw law = MpMixtureTwo{alpha, t};
  validate(law);
  return law;
}

LimitLaw mp_mixture_three(double alpha_plus, double alpha_minus, double t) {
  LimitLaw law = MpMixtureThree{alpha_plus, alpha_minus, t};
  validate(law);
  return law;
}

MixtureWeights mixture_weights(const MpMixtureTwo& law) {
  return {(1.0 + law.alpha) / 2.0, (1.0 - law.alpha) / 2.0, 0.0, law.alpha};
}

MixtureWeights mixture_weights(const MpMixtureThree& law) {
  const double ap = law.alpha_plus, am = law.alpha_minus, den = ap * am - 1.0;
  return {(am - 1.0) / den, (ap - 1.0) / den, (ap - 1.0) * (am - 1.0) / den, (am - ap) / den};
}

void validate(const LimitLaw& law) {
  std::visit(
      [](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PointMass>) {
          require(std::isfinite(l.location), "PointMass: location must be finite");
        } else if constexpr (std::is_same_v<L, Semicircle>) {
          require(std::isfinite(l.center), "Semicircle: center must be finite");
          require(finite_nonneg(l.variance), "Semicircle: variance must be finite and >= 0");
        } else if constexpr (std::is_same_v<L, MarchenkoPastur>) {
          require(finite_nonneg(l.alpha), "MarchenkoPastur: alpha must be >= 0");
          require(finite_nonneg(l.t), "MarchenkoPastur: t must be >= 0");
          check_beta(l.beta, "MarchenkoPastur");
        } else if constexpr (std::is_same_v<L, MpMixtureTwo>) {
          require(l.alpha >= 0.0 && l.alpha < 1.0, "mp_mixture_two: alpha must lie in [0, 1)");
          require(finite_nonneg(l.t), "mp_mixture_two: t must be >= 0");
        } else if constexpr (std::is_same_v<L, MpMixtureThree>) {
          require(std::isfinite(l.alpha_minus) && l.alpha_plus > 1.0 && l.alpha_minus >= l.alpha_plus,
                  "mp_mixture_three: need alpha_minus >= alpha_plus > 1");
          require(finite_nonneg(l.t), "mp_mixture_three: t must be >= 0");
        } else if constexpr (std::is_same_v<L, GeometricLaw>) {
          require(std::isfinite(l.a) && l.a > 0.0, "GeometricLaw: a must be > 0");
          require(std::isfinite(l.alpha), "GeometricLaw: alpha must be finite");
          require(finite_nonneg(l.t), "GeometricLaw: t must be >= 0");
          check_beta(l.beta, "GeometricLaw");
        } else if constexpr (std::is_same_v<L, JacobiLaw>) {
          require(l.a >= 0.0 && l.a <= 1.0, "JacobiLaw: a must lie in [0, 1]");
          require(finite_nonneg(l.p) && finite_nonneg(l.q), "JacobiLaw: p, q must be >= 0");
          require(finite_nonneg(l.t), "JacobiLaw: t must be >= 0");
          check_beta(l.beta, "JacobiLaw");
        }
      },
      law);
}

std::string describe(const LimitLaw& law) {
  std::ostringstream os;
  os.precision(6);
  std::visit(
      [&os](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PointMass>)
          os << "delta(" << l.location << ")";
        else if constexpr (std::is_same_v<L, Semicircle>)
          os << "semicircle(center=" << l.center << ", variance=" << l.variance << ")";
        else if constexpr (std::is_same_v<L, MarchenkoPastur>)
          os << "marchenko_pastur(alpha=" << l.alpha << ", t=" << l.t << ", beta=" << l.beta << ")";
        else if constexpr (std::is_same_v<L, MpMixtureTwo>)
          os << "mp_mixture_two(alpha=" << l.alpha << ", t=" << l.t << ")";
        else if constexpr (std::is_same_v<L, MpMixtureThree>)
          os << "mp_mixture_three(alpha+=" << l.alpha_plus << ", alpha-=" << l.alpha_minus << ", t=" << l.t << ")";
        else if constexpr (std::is_same_v<L, GeometricLaw>)
          os << "geometric(a=" << l.a << ", alpha=" << l.alpha << ", beta=" << l.beta << ", t=" << l.t << ")";
        else
          os << "jacobi(p=" << l.p << ", q=" << l.q << ", beta=" << l.beta << ", a=" << l.a << ", t=" << l.t << ")";
      },
      law);
  return os.str();
}

bool has_cdf(const LimitLaw& law) { return !moment_only(law); }

double cdf(const LimitLaw& law, double x) { return cdf_of(decompose(law), x, false); }

double cdf_left(const LimitLaw& law, double x) { return cdf_of(decompose(law), x, true); }

double density(const LimitLaw& law, double x) { return density_of(decompose(law), x); }

std::vector<Atom> atoms(const LimitLaw& law) { return decompose(law).atoms; }

std::pair<double, double> support(const LimitLaw& law) { return support_of(decompose(law)); }

namespace {

double quantile_of(const Decomposed& d, double u) {
  for (const auto& a : d.atoms)
    if (cdf_of(d, a.location, true) < u && u <= cdf_of(d, a.location, false)) return a.location;
  auto [lo, hi] = support_of(d);
  if (lo == hi) return lo;
  // invariant F(lo) < u <= F(hi); lo may carry F(lo) >= u only through an atom,
  // which was handled above
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    const double f = cdf_of(d, x, false);
    if (std::fabs(f - u) <= 1e-15) return x;
    if (f >= u)
      hi = x;
    else
      lo = x;
    if (hi - lo <= 4e-16 * std::max({1.0, std::fabs(lo), std::fabs(hi)})) break;
    const double rho = density_of(d, x);
    double next = 0.5 * (lo + hi);
    if (rho > 0.0) {
      const double newton = x - (f - u) / rho;
      if (newton > lo && newton < hi) next = newton;
    }
    if (next == x) break;
    x = next;
  }
  return hi;
}

}  // namespace

double quantile(const LimitLaw& law, double u) {
  if (!(u > 0.0 && u < 1.0)) throw ValidationError("quantile: u must lie in (0, 1)");
  return quantile_of(decompose(law), u);
}

std::vector<double> quantile_atoms(const LimitLaw& law, std::size_t count) {
  if (count == 0) throw ValidationError("quantile_atoms: count must be >= 1");
  const Decomposed d = decompose(law);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = quantile_of(d, (static_cast<double>(i) + 0.5) / count);
  return out;
}

MomentSequence law_moments(const LimitLaw& law, std::size_t k_max) {
  validate(law);
  if (const auto* g = std::get_if<GeometricLaw>(&law)) return geometric_moments(g->a, g->alpha, g->beta, g->t, k_max);
  if (const auto* j = std::get_if<JacobiLaw>(&law)) return jacobi_moments(j->p, j->q, j->beta, j->a, j->t, 1e-3, k_max).back();
  if (const auto* m = std::get_if<MarchenkoPastur>(&law)) return mp_moments(m->alpha, m->beta, m->t, k_max);

  MomentSequence out;
  out.m.assign(k_max + 1, 0.0);
  const Decomposed d = decompose(law);
  for (const auto& a : d.atoms) {
    double p = 1.0;
    for (std::size_t k = 0; k <= k_max; ++k, p *= a.location) out.m[k] += a.mass * p;
  }
  for (const auto& s : d.sc) {
    // binomial expansion of the centered Catalan moments
    const MomentSequence c = semicircle_moments(s.variance, 2, k_max);
    for (std::size_t k = 0; k <= k_max; ++k) {
      double binom = 1.0, sum = 0.0;
      for (std::size_t j = 0; j <= k; ++j) {
        sum += binom * c.m[j] * std::pow(s.center, static_cast<double>(k - j));
        binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
      }
      out.m[k] += s.weight * sum;
    }
  }
  for (const auto& p : d.mp) {
    // full piece moments minus its atom at 0 (which contributes only to m_0)
    const MomentSequence q = mp_moments(p.ratio, 1.0, p.scale, k_max);
    for (std::size_t k = 0; k <= k_max; ++k) {
      const double v = k == 0 ? p.mass() : q.m[k];
      out.m[k] += p.weight * ((p.reflected && k % 2 == 1) ? -v : v);
    }
  }
  if (const auto* t = std::get_if<MpMixtureTwo>(&law)) out.t = t->t;
  if (const auto* t = std::get_if<MpMixtureThree>(&law)) out.t = t->t;
  out.m[0] = 1.0;
  return out;
}

std::complex<double> integrate(const LimitLaw& law, const std::function<std::complex<double>(double)>& phi) {
  const Decomposed d = decompose(law);
  std::complex<double> total = 0.0;
  for (const auto& a : d.atoms) total += a.mass * phi(a.location);
  for (const auto& s : d.sc) {
    const double r = s.radius(), c = s.center;
    auto f = [&](double th) {
      const double sn = std::sin(th);
      return phi(c - r * std::cos(th)) * (sn * sn);
    };
    total += s.weight * (2.0 / kPi) * integrate_adaptive<std::complex<double>>(f, 0.0, kPi).value;
  }
  for (const auto& p : d.mp) {
    const double a = p.lower(), r = p.radius(), sgn = p.reflected ? -1.0 : 1.0;
    const double pref = r * r / (2.0 * kPi * p.scale);
    auto f = [&](double th) {
      const double sh = std::sin(0.5 * th), sn = std::sin(th);
      const double x = a + 2.0 * r * sh * sh;
      return phi(sgn * x) * (pref * sn * sn / x);
    };
    total += p.weight * integrate_adaptive<std::complex<double>>(f, 0.0, kPi).value;
  }
  return total;
}

double continuous_mass(const LimitLaw& law) {
  const Decomposed d = decompose(law);
  double atom_mass = 0.0;
  for (const auto& a : d.atoms) atom_mass += a.mass;
  return integrate(law, [](double) { return std::complex<double>(1.0); }).real() - atom_mass;
}

}  // namespace rmflow
