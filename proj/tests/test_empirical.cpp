#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "rmflow/empirical.hpp"
#include "rmflow/errors.hpp"
#include "test_support.hpp"

using namespace rmflow;
using namespace rmflow::testing;

namespace {

EmpiricalMeasure iid_sample(const LimitLaw& law, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) {
    double u = 0.0;
    while (u <= 0.0) u = uniform(rng, 0.0, 1.0);
    v = quantile(law, u);
  }
  return EmpiricalMeasure(std::move(x));
}

// The law discretized on quantile atoms at every grid time.
EmpiricalMeasureProcess law_process(const std::function<LimitLaw(double)>& law_at, double t_final, double dt,
                                    std::size_t atoms) {
  EmpiricalMeasureProcess p;
  const int steps = static_cast<int>(std::lround(t_final / dt));
  for (int i = 0; i <= steps; ++i) {
    const double t = i * dt;
    p.t_grid.push_back(t);
    p.measures.emplace_back(quantile_atoms(law_at(t), atoms));
  }
  return p;
}

FlowSpec dyson(std::size_t n, int beta) {
  FlowSpec s;
  s.g = SpectralFunction::constant(0.5);
  s.h = SpectralFunction::constant(1.0);
  s.beta = beta;
  s.n = n;
  s.dt = 0.01;
  for (int i = 0; i <= 20; ++i) s.t_grid.push_back(0.05 * i);
  s.initial_spectrum.assign(n, 0.0);
  return s;
}

}  // namespace

TEST_CASE("moments and CDF of an empirical measure") {
  EmpiricalMeasure a({1.0, -1.0});
  CHECK(moment(a, 2) == 1.0);
  CHECK(moment(a, 0) == 1.0);
  CHECK(moment(a, 1) == 0.0);
  EmpiricalMeasure b({3.0, 1.0, 2.0});
  CHECK(moment(b, 1) == 2.0);
  CHECK(b.atoms() == std::vector<double>{1, 2, 3});
  CHECK(cdf(b, 2.0) == doctest::Approx(2.0 / 3));
  CHECK(cdf_left(b, 2.0) == doctest::Approx(1.0 / 3));
  CHECK(cdf(b, 0.5) == 0.0);
  CHECK(cdf(b, 3.0) == 1.0);
  CHECK_THROWS_AS(EmpiricalMeasure(std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(EmpiricalMeasure({1.0, NAN}), ValidationError);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(1 + trial % 17);
    for (auto& v : x) v = uniform(rng, -3, 3);
    EmpiricalMeasure m(x);
    for (std::size_t k = 1; k <= 6; ++k) CHECK(moment(m, 2 * k) >= moment(m, k) * moment(m, k) * (1 - 1e-12));
  }
}

TEST_CASE("KS distance") {
  CHECK(ks_distance(EmpiricalMeasure({0.0}), PointMass{0.0}) == 0.0);
  CHECK(ks_distance(EmpiricalMeasure({0.0, 0.0, 0.0}), PointMass{0.0}) == 0.0);
  CHECK(ks_distance(EmpiricalMeasure({0.0, 1.0}), PointMass{0.0}) == doctest::Approx(0.5));
  CHECK(ks_distance(EmpiricalMeasure({0.1}), PointMass{0.0}) == 1.0);

  const std::vector<LimitLaw> laws{Semicircle{0.0, 1.0}, MarchenkoPastur{0.3, 1.0, 1}, MarchenkoPastur{2.5, 1.0, 2},
                                   MpMixtureTwo{0.5, 1.0}, MpMixtureThree{2.0, 3.0, 1.0}};
  std::uint64_t seed = 17;
  for (const auto& law : laws) {
    // DKW: P(ks > 0.03) <= 2 exp(-2 n 0.03^2) ~ 3e-8 at n = 1e4
    CHECK(ks_distance(iid_sample(law, 10000, seed++), law) <= 0.03);
    // midpoint quantiles of a law sit within half a level of it
    const auto q = EmpiricalMeasure(quantile_atoms(law, 200));
    CHECK(ks_distance(q, law) <= 0.5 / 200 + 1e-9);
  }
  // the MP atom is honoured: half the sample at 0 matches the law exactly there
  const LimitLaw half = MarchenkoPastur{0.5, 1.0, 1};
  CHECK(ks_distance(EmpiricalMeasure(quantile_atoms(half, 1000)), half) <= 0.5 / 1000 + 1e-9);

  CHECK_THROWS_AS(ks_distance(EmpiricalMeasure({1.0}), GeometricLaw{}), UnsupportedOperation);
}

TEST_CASE("Wasserstein-1") {
  CHECK(wasserstein1(EmpiricalMeasure({0.0}), PointMass{0.0}) == 0.0);
  CHECK(wasserstein1(EmpiricalMeasure({0.0, 1.0}), PointMass{0.5}) == doctest::Approx(0.5));
  CHECK(wasserstein1(EmpiricalMeasure({-1.0, 2.0, 4.0}), PointMass{1.0}) == doctest::Approx(2.0));

  // single atom at a against a law: W1 = E|X - a|
  const double r = 2.0;  // variance 1
  CHECK(wasserstein1(EmpiricalMeasure({0.0}), Semicircle{0.0, 1.0}) ==
        doctest::Approx(4.0 * r / (3.0 * std::numbers::pi)).epsilon(1e-6));
  for (const LimitLaw& law : {LimitLaw{MarchenkoPastur{1.0, 1.0, 1}}, LimitLaw{MarchenkoPastur{0.3, 2.0, 1}},
                              LimitLaw{MpMixtureThree{2.0, 3.0, 1.0}}}) {
    for (double a : {0.0, 0.7, 2.0}) {
      const double mean_abs =
          integrate(law, [a](double x) { return std::complex<double>(std::fabs(x - a)); }).real();
      CHECK(wasserstein1(EmpiricalMeasure({a}), law) == doctest::Approx(mean_abs).epsilon(1e-5));
    }
  }

  // quantile form: W1 = int_0^1 |Q_law(u) - Q_emp(u)| du
  for (const LimitLaw& law : {LimitLaw{Semicircle{0.0, 1.0}}, LimitLaw{MpMixtureTwo{0.5, 1.0}}}) {
    std::mt19937_64 rng(5);
    const auto m = EmpiricalMeasure([&] {
      std::vector<double> x(50);
      for (auto& v : x) v = uniform(rng, -2, 3);
      return x;
    }());
    const int N = 20000;
    double oracle = 0.0;
    for (int i = 0; i < N; ++i) {
      const double u = (i + 0.5) / N;
      const double qe = m.atoms()[static_cast<std::size_t>(u * 50)];
      oracle += std::fabs(quantile(law, u) - qe) / N;
    }
    CHECK(wasserstein1(m, law) == doctest::Approx(oracle).epsilon(2e-3));
  }

  // own discretization: every unit of mass moves less than the widest cell
  for (const LimitLaw& law : {LimitLaw{Semicircle{0.0, 1.0}}, LimitLaw{MarchenkoPastur{2.5, 1.0, 2}}}) {
    const auto q = quantile_atoms(law, 400);
    const auto [lo, hi] = support(law);
    double width = std::max(q.front() - lo, hi - q.back());
    for (std::size_t i = 1; i < q.size(); ++i) width = std::max(width, q[i] - q[i - 1]);
    CHECK(wasserstein1(EmpiricalMeasure(q), law) <= width);
  }
}

TEST_CASE("limit equation residual") {
  SUBCASE("frozen flow") {
    EmpiricalMeasureProcess p;
    p.t_grid = {0.0, 0.3, 1.0};
    for (int i = 0; i < 3; ++i) p.measures.emplace_back(std::vector<double>{-1.0, 0.2, 3.0});
    const auto z = SpectralFunction::zero();
    CHECK(limit_equation_residual(p, Polynomial::monomial(4), z, z, z, 2.0) == 0.0);
  }
  SUBCASE("semicircle family") {
    const auto proc = law_process([](double t) { return LimitLaw{semicircle_law(t, 2)}; }, 1.0, 1e-2, 400);
    const auto g2 = SpectralFunction::constant(0.25), h2 = SpectralFunction::constant(1.0);
    const auto b = SpectralFunction::zero();
    CHECK(limit_equation_residual(proc, Polynomial::monomial(2), g2, h2, b, 2.0) <= 2e-2);
    CHECK(limit_equation_residual(proc, Polynomial::monomial(4), g2, h2, b, 2.0) <= 2e-2);
    // the wrong beta is visible
    CHECK(limit_equation_residual(proc, Polynomial::monomial(2), g2, h2, b, 1.0) > 0.4);
  }
  SUBCASE("MP family") {
    const double alpha = 2.5;
    const auto proc = law_process([&](double t) { return LimitLaw{MarchenkoPastur{alpha, t, 2}}; }, 1.0, 1e-2, 400);
    const auto g2 = SpectralFunction::identity(), h2 = SpectralFunction::constant(1.0);
    const auto b = SpectralFunction::constant(alpha);
    for (int k = 1; k <= 3; ++k)
      CHECK(limit_equation_residual(proc, Polynomial::monomial(k), g2, h2, b, 2.0) <= 2e-2);
  }
  SUBCASE("non-uniqueness mixtures solve the |x| + |y| equation") {
    const auto g2 = SpectralFunction::abs(), h2 = SpectralFunction::constant(1.0);
    const auto two = law_process([](double t) { return mp_mixture_two(0.5, t); }, 1.0, 1e-2, 400);
    const auto three = law_process([](double t) { return mp_mixture_three(2.0, 3.0, t); }, 1.0, 1e-2, 400);
    for (int k = 1; k <= 4; ++k) {
      CHECK(limit_equation_residual(two, Polynomial::monomial(k), g2, h2, SpectralFunction::constant(0.5), 1.0) <= 2e-2);
      CHECK(limit_equation_residual(three, Polynomial::monomial(k), g2, h2, SpectralFunction::constant(0.2), 1.0) <=
            2e-2);
    }
    // and the plain-MP equation (g^2 = x) rejects the two-sided mixture
    CHECK(limit_equation_residual(two, Polynomial::monomial(2), SpectralFunction::identity(), h2,
                                  SpectralFunction::constant(0.5), 1.0) > 0.05);
  }
  SUBCASE("relabeling and degree") {
    EmpiricalMeasureProcess p, q;
    p.t_grid = q.t_grid = {0.0, 1.0};
    p.measures = {EmpiricalMeasure({0.0, 1.0, 2.0}), EmpiricalMeasure({0.5, -1.0, 3.0})};
    q.measures = {EmpiricalMeasure({2.0, 0.0, 1.0}), EmpiricalMeasure({3.0, 0.5, -1.0})};
    const auto g2 = SpectralFunction::abs(), h2 = SpectralFunction::constant(1.0), b = SpectralFunction::constant(0.3);
    CHECK(limit_equation_residual(p, Polynomial::monomial(5), g2, h2, b, 1.0) ==
          limit_equation_residual(q, Polynomial::monomial(5), g2, h2, b, 1.0));
    CHECK_THROWS_AS(limit_equation_residual(p, Polynomial::monomial(13), g2, h2, b, 1.0), ValidationError);
  }
}

TEST_CASE("double integral matches the direct pairwise sum") {
  std::mt19937_64 rng(9);
  std::vector<double> x(7);
  for (auto& v : x) v = uniform(rng, -2, 2);
  x[3] = x[1];  // a tie exercises the diagonal convention
  EmpiricalMeasureProcess p;
  p.t_grid = {0.0, 1.0};
  p.measures = {EmpiricalMeasure(std::vector<double>(7, 0.0)), EmpiricalMeasure(x)};
  const Polynomial f{0.3, -1.0, 0.5, 2.0, -0.25, 0.1};
  const auto g2 = SpectralFunction::abs(0.7), h2 = SpectralFunction::polynomial(Polynomial{1.0, 0.0, 0.5});
  const auto b = SpectralFunction::affine(-0.4, 0.2);
  const double beta = 1.0;
  // direct: rate at the second time via the divided difference
  const Polynomial fp = f.derivative();
  double direct = 0.0, drift = 0.0;
  for (double u : x) {
    drift += b(u) * fp(u) / 7.0;
    for (double v : x) direct += fp.divided_difference(u, v) * (g2(u) * h2(v) + g2(v) * h2(u)) / 49.0;
  }
  double rate0 = 0.0;  // everything at 0
  rate0 = b(0.0) * fp(0.0) + 0.5 * beta * fp.derivative()(0.0) * 2.0 * g2(0.0) * h2(0.0);
  double mean_f = 0.0;
  for (double u : x) mean_f += f(u) / 7.0;
  const double expect = mean_f - f(0.0) - 0.5 * (rate0 + drift + 0.5 * beta * direct);
  const auto r = limit_equation_residuals(p, f, g2, h2, b, beta);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("semimartingale decomposition") {
  SUBCASE("beta = 2 has no correction; constant f has no terms") {
    const FlowSpec s = dyson(20, 2);
    const auto proc = EmpiricalMeasureProcess::from_path(simulate_path(s, 1));
    const auto d = em_sde_decomposition(proc, Polynomial::monomial(4), s);
    for (double c : d.correction) CHECK(c == 0.0);
    const auto z = em_sde_decomposition(proc, Polynomial{3.0}, s);
    for (std::size_t i = 0; i < z.t_grid.size(); ++i) {
      CHECK(z.increment[i] == 0.0);
      CHECK(z.drift[i] == 0.0);
      CHECK(z.interaction[i] == 0.0);
      CHECK(z.martingale[i] == 0.0);
    }
  }
  SUBCASE("real Dyson, f = x^2: correction is t / (2n)") {
    const FlowSpec s = dyson(25, 1);
    const auto proc = EmpiricalMeasureProcess::from_path(simulate_path(s, 2));
    const auto d = em_sde_decomposition(proc, Polynomial::monomial(2), s);
    for (std::size_t i = 0; i < d.t_grid.size(); ++i) {
      CHECK(d.correction[i] == doctest::Approx(d.t_grid[i] / 50.0).epsilon(1e-12));
      CHECK(d.interaction[i] == doctest::Approx(0.5 * d.t_grid[i]).epsilon(1e-12));
      CHECK(d.increment[i] == doctest::Approx(d.drift[i] + d.correction[i] + d.interaction[i] + d.martingale[i]));
    }
  }
  SUBCASE("martingale part has mean zero") {
    FlowSpec s = dyson(20, 1);
    s.b = SpectralFunction::affine(-0.5 * 20, 0.0);  // b_n = -n x / 2
    const auto paths = simulate_ensemble(s, 40, 77, 1);
    std::vector<double> mart;
    for (const auto& p : paths)
      mart.push_back(em_sde_decomposition(EmpiricalMeasureProcess::from_path(p), Polynomial::monomial(2), s).martingale.back());
    const double n = static_cast<double>(mart.size());
    const double mean = std::accumulate(mart.begin(), mart.end(), 0.0) / n;
    double s2 = 0.0;
    for (double v : mart) s2 += (v - mean) * (v - mean);
    const double se = std::sqrt(s2 / (n - 1) / n);
    // dt bias of the EM chain and the trapezoid are O(1e-2) at this step
    CHECK(std::fabs(mean) <= 4.0 * se + 1e-2);
  }
  SUBCASE("guards") {
    FlowSpec s = dyson(4, 2);
    const auto proc = EmpiricalMeasureProcess::from_path(simulate_path(s, 3));
    s.n = 5;
    CHECK_THROWS_AS(em_sde_decomposition(proc, Polynomial::monomial(2), s), ValidationError);
    s.n = 4;
    s.scaling = TimeScaling::unscaled;
    CHECK_THROWS_AS(em_sde_decomposition(proc, Polynomial::monomial(2), s), UnsupportedOperation);
  }
}
