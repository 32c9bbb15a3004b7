#include "rmflow/moments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rmflow/errors.hpp"
#include "rmflow/linalg.hpp"

namespace rmflow {

namespace {

Rational rational_of(std::size_t k) { return Rational(static_cast<long long>(k)); }

void require_nonneg(double x, const char* what) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(std::string(what) + " must be finite and >= 0");
}

}  // namespace

const MomentSequence& MomentTrajectory::nearest(double t) const {
  if (times.empty()) throw ValidationError("MomentTrajectory: empty");
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return moments.back();
  std::size_t k = static_cast<std::size_t>(it - times.begin());
  if (k > 0 && std::fabs(times[k - 1] - t) <= std::fabs(times[k] - t)) --k;
  return moments[k];
}

MomentSequence evaluate(const MomentPolynomials& table, double t) {
  MomentSequence s;
  s.t = t;
  s.m.reserve(table.size());
  for (const auto& p : table) s.m.push_back(p(t));
  return s;
}

MomentPolynomials wigner_moment_polynomials(int beta, std::size_t k_max) {
  if (beta != 1 && beta != 2) throw ValidationError("wigner moments: beta must be 1 or 2");
  MomentPolynomials m(k_max + 1);
  m[0] = RationalPolynomial::constant(1);
  const Rational c = Rational(beta, 4);
  for (std::size_t k = 1; k <= k_max; ++k) {
    RationalPolynomial acc;
    for (std::size_t i = 0; i + 2 <= k; ++i) acc = acc + m[i] * m[k - 2 - i];
    m[k] = (c * rational_of(k)) * acc.integral();
  }
  return m;
}

MomentSequence semicircle_moments(double t, int beta, std::size_t k_max) {
  require_nonneg(t, "semicircle_moments: t");
  return evaluate(wigner_moment_polynomials(beta, k_max), t);
}

MpEdges mp_params(double alpha) {
  require_nonneg(alpha, "mp_params: alpha");
  const double r = std::sqrt(alpha);
  return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

MomentPolynomials mp_moment_polynomials(double alpha, double beta, std::size_t k_max) {
  require_nonneg(alpha, "mp_moments: alpha");
  require_nonneg(beta, "mp_moments: beta");
  const Rational a = to_rational(alpha), b = to_rational(beta);
  MomentPolynomials m(k_max + 1);
  m[0] = RationalPolynomial::constant(1);
  for (std::size_t k = 1; k <= k_max; ++k) {
    RationalPolynomial acc = a * m[k - 1];
    for (std::size_t i = 0; i + 2 <= k; ++i) acc = acc + b * (m[i + 1] * m[k - 2 - i]);
    m[k] = rational_of(k) * acc.integral();
  }
  return m;
}

MomentSequence mp_moments(double alpha, double beta, double t, std::size_t k_max) {
  require_nonneg(t, "mp_moments: t");
  return evaluate(mp_moment_polynomials(alpha, beta, k_max), t);
}

MomentPolynomials geometric_w(std::size_t k_max) {
  MomentPolynomials w(k_max + 1);
  w[0] = RationalPolynomial::constant(1);
  if (k_max >= 1) w[1] = RationalPolynomial::constant(1);
  for (std::size_t k = 2; k <= k_max; ++k) {
    RationalPolynomial acc;
    for (std::size_t i = 0; i + 2 <= k; ++i) acc = acc + w[i + 1] * w[k - 1 - i];
    w[k] = rational_of(k) * acc.integral() + RationalPolynomial::constant(1);
  }
  return w;
}

double geometric_w_bound(std::size_t k, double x) {
  return std::tgamma(static_cast<double>(k) + 1.0) * std::pow(9.0, static_cast<double>(k) - 1.0) *
         std::pow(1.0 + x, static_cast<double>(k) - 1.0);
}

MomentSequence geometric_moments(double a, double alpha, double beta, double t, std::size_t k_max) {
  if (!(a > 0.0)) throw ValidationError("geometric_moments: a must be > 0");
  require_nonneg(t, "geometric_moments: t");
  const auto w = geometric_w(k_max);
  MomentSequence s;
  s.t = t;
  s.m.resize(k_max + 1);
  const double x = t * beta;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double wk = w[k](x);
    if (k >= 1 && x >= 0.0 && wk > geometric_w_bound(k, x) * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "geometric_moments: w_" << k << "(" << x << ") = " << wk << " exceeds its growth bound";
      throw NumericalError(os.str());
    }
    const double kk = static_cast<double>(k);
    s.m[k] = std::pow(a, kk) * wk * std::exp(kk * alpha * t);
  }
  return s;
}

MomentTrajectory generic_moment_ode(const std::vector<double>& b, const std::vector<double>& g2,
                                    const std::vector<double>& h2, double beta,
                                    const std::vector<double>& initial, std::size_t k_max,
                                    double t_final, double dt) {
  if (k_max < 1) throw ValidationError("generic_moment_ode: k_max must be >= 1");
  if (!(dt > 0.0)) throw ValidationError("generic_moment_ode: dt must be > 0");
  require_nonneg(t_final, "generic_moment_ode: t_final");
  if (initial.size() < k_max + 1)
    throw ValidationError("generic_moment_ode: initial moments must cover m_0..m_kmax");
  auto degree = [](const std::vector<double>& c) {
    int d = static_cast<int>(c.size()) - 1;
    while (d >= 0 && c[static_cast<std::size_t>(d)] == 0.0) --d;
    return d;
  };
  const int db = degree(b), dg = degree(g2), dh = degree(h2);
  const long K = static_cast<long>(k_max);
  // Highest moment index appearing on the right-hand side of m_K'.
  long need = 0;
  if (db >= 0) need = std::max(need, K - 1 + db);
  if (K >= 2 && dg >= 0 && dh >= 0) need = std::max(need, K - 2 + std::max(dg, dh));
  if (need > K) {
    std::ostringstream os;
    os << "generic_moment_ode: coefficient degrees (b " << db << ", g^2 " << dg << ", h^2 " << dh
       << ") make m_" << K << "' depend on m_" << need << ", beyond the computed triangle";
    throw TruncationError(os.str());
  }

  const std::size_t n = k_max + 1;
  auto rhs = [&](const std::vector<double>& m, std::vector<double>& out) {
    out.assign(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
      const double kk = static_cast<double>(k);
      double s = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j)
        if (b[j] != 0.0) s += b[j] * m[k - 1 + j];
      double pair = 0.0;
      for (std::size_t i = 0; i + 2 <= k; ++i)
        for (std::size_t j1 = 0; j1 < g2.size(); ++j1) {
          if (g2[j1] == 0.0) continue;
          for (std::size_t j2 = 0; j2 < h2.size(); ++j2) {
            if (h2[j2] == 0.0) continue;
            pair += g2[j1] * h2[j2] * (m[i + j1] * m[k - 2 - i + j2] + m[i + j2] * m[k - 2 - i + j1]);
          }
        }
      out[k] = kk * s + 0.5 * beta * kk * pair;
    }
  };

  MomentTrajectory tr;
  std::vector<double> m(initial.begin(), initial.begin() + static_cast<long>(n));
  const std::size_t steps = static_cast<std::size_t>(std::llround(t_final / dt));
  tr.times.reserve(steps + 1);
  tr.moments.reserve(steps + 1);
  tr.times.push_back(0.0);
  tr.moments.push_back({0.0, m});
  std::vector<double> k1, k2, k3, k4, tmp(n);
  for (std::size_t s = 1; s <= steps; ++s) {
    rhs(m, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = m[i] + 0.5 * dt * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = m[i] + 0.5 * dt * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = m[i] + dt * k3[i];
    rhs(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) m[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (double x : m)
      if (!std::isfinite(x)) throw NumericalError("generic_moment_ode: moments blew up");
    const double t = static_cast<double>(s) * dt;
    tr.times.push_back(t);
    tr.moments.push_back({t, m});
  }
  return tr;
}

MomentTrajectory jacobi_moments(double p, double q, double beta, double a, double t_final, double dt,
                                std::size_t k_max) {
  if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("jacobi_moments: a must lie in [0,1]");
  std::vector<double> init(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) init[k] = std::pow(a, static_cast<double>(k));
  auto tr = generic_moment_ode({p, -(p + q)}, {0.0, 1.0}, {1.0, -1.0}, beta, init, k_max, t_final, dt);
  constexpr double tol = 1e-6;
  for (const auto& s : tr.moments) {
    for (std::size_t k = 0; k < k_max; ++k) {
      if (s.m[k + 1] < -tol || s.m[k + 1] > s.m[k] + tol) {
        std::ostringstream os;
        os << "jacobi_moments: m_" << k + 1 << "(" << s.t << ") = " << s.m[k + 1] << " outside [0, m_" << k
           << " = " << s.m[k] << "]; check the drift sign";
        throw NumericalError(os.str());
      }
    }
  }
  return tr;
}

bool hankel_psd(const MomentSequence& s, double tol) {
  const std::size_t d = s.m.size() / 2 + (s.m.size() % 2);  // (k_max / 2) + 1
  RealMatrix h(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) h(i, j) = s.m[i + j];
  const auto ev = eigen(h).eigenvalues;
  return ev.front() >= -tol * std::max(1.0, ev.back());
}

}  // namespace rmflow
