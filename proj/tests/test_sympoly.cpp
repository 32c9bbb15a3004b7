#include <doctest.h>

#include <cmath>
#include <random>

#include "rmflow/errors.hpp"
#include "rmflow/sympoly.hpp"
#include "test_support.hpp"

using namespace rmflow;
using namespace rmflow::testing;

namespace {

std::vector<double> random_spectrum(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("elementary symmetric polynomials") {
  std::vector<double> a{1, 2, 3};
  CHECK(elementary_symmetric(a) == std::vector<double>{1, 6, 11, 6});
  std::vector<double> z(5, 0.0);
  CHECK(elementary_symmetric(z) == std::vector<double>{1, 0, 0, 0, 0, 0});
  std::vector<double> c{2.5};
  CHECK(elementary_symmetric(c) == std::vector<double>{1, 2.5});
}

TEST_CASE("power sums") {
  std::vector<double> a{1, 2, 3};
  CHECK(power_sums(a, 2) == std::vector<double>{6, 14});
  std::vector<double> b{-1, 1};
  CHECK(power_sums(b, 3) == std::vector<double>{0, 2, 0});
  std::mt19937_64 rng(2);
  const auto r = random_spectrum(rng, 9, -1, 1);
  CHECK(power_sums(r, 1)[0] == doctest::Approx(elementary_symmetric(r)[1]).epsilon(1e-15));
}

TEST_CASE("Newton identities") {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 20;
    const auto lam = random_spectrum(rng, n, -1, 1);
    const auto e = elementary_symmetric(lam);
    const auto p = power_sums(lam, n);
    for (std::size_t k = 1; k <= n; ++k) worst = std::max(worst, newton_residual(e, p, k));
  }
  CHECK(worst <= 1e-9);

  for (int n : {3, 10, 20}) {
    std::vector<double> ones(n, 1.0);
    const auto e = elementary_symmetric(ones);
    const auto p = power_sums(ones, n);
    for (int k = 1; k <= n; ++k) {
      CHECK(e[k] == doctest::Approx(binom(n, k)).epsilon(1e-14));
      CHECK(newton_residual(e, p, k) <= 1e-12);
    }
    CHECK(newton_residual(e, p, 1) == 0.0);
  }
}

TEST_CASE("pairwise drift identity") {
  const auto one = SpectralFunction::constant(1.0);
  std::mt19937_64 rng(6);

  // G = 2: both sides are 2 * n(n-1)/2 at k = 2
  const auto lam = random_spectrum(rng, 12, -3, 3);
  CHECK(pairwise_drift_identity_residual(lam, one, one, 2) <= 1e-10);

  // by hand, lambda = (1,2), G = 2, k = 3:
  // LHS = 1^2 * 2/(1-2) + 2^2 * 2/(2-1) = 6,  RHS = (1 + 2) * 2 = 6
  std::vector<double> two{1, 2};
  CHECK(pairwise_drift_identity_residual(two, one, one, 3) <= 1e-12);

  double worst = 0.0;
  const auto g = SpectralFunction::sqrt_abs();  // g^2 = x
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 19;
    const auto l = random_spectrum(rng, n, 0.1, 2.0);
    for (std::size_t k = 2; k <= 8; ++k) worst = std::max(worst, pairwise_drift_identity_residual(l, g, one, k));
  }
  CHECK(worst <= 1e-9);

  std::vector<double> dup{0.5, 0.5, 1.0};
  CHECK_THROWS_AS(pairwise_drift_identity_residual(dup, one, one, 2), ValidationError);
}

TEST_CASE("incomplete polynomial relations") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 19;
    const auto lam = random_spectrum(rng, n, 0.05, 3.0);
    const auto e = elementary_symmetric(lam);
    double sum1 = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t s1[1] = {i};
      const double ei = incomplete_elementary_symmetric(lam, n - 1, s1);
      CHECK(std::fabs(lam[i] * ei - e[n]) <= 1e-10 * (1.0 + std::fabs(e[n])));
      sum1 += ei;
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::size_t s2[2] = {i, j};
        sum2 += (lam[i] + lam[j]) * incomplete_elementary_symmetric(lam, n - 2, s2);
      }
    }
    CHECK(std::fabs(sum1 - e[n - 1]) <= 1e-10 * (1.0 + std::fabs(e[n - 1])));
    const double target = static_cast<double>(n - 1) * e[n - 1];
    CHECK(std::fabs(sum2 - target) <= 1e-10 * (1.0 + std::fabs(target)));
  }
}

TEST_CASE("log-det drift") {
  const auto g = SpectralFunction::affine(0.3, 0.2);
  const auto h = SpectralFunction::constant(0.7);
  const auto b = SpectralFunction::affine(-1.0, 2.0);
  // n = 1: b/l - 2 g^2 h^2 / l^2
  std::vector<double> one{1.7};
  const double gv = g(1.7), hv = h(1.7);
  CHECK(log_det_drift(one, g, h, b, 2) ==
        doctest::Approx(b(1.7) / 1.7 - 2.0 * gv * gv * hv * hv / (1.7 * 1.7)).epsilon(1e-14));

  // all eigenvalues 1, g = 0.5, h = 2, b = 3, n = 4, beta = 1:
  // e_n = 1, every incomplete polynomial is 1;
  // -2/(n) * n * (g h)^2 + (1/n)(n b - beta * C(n,2) * 2 (gh)^2)
  std::vector<double> ones(4, 1.0);
  const double expect = -2.0 / 4.0 * 4.0 * 1.0 + (4.0 * 3.0 - 1.0 * 6.0 * 2.0 * 1.0) / 4.0;
  CHECK(log_det_drift(ones, SpectralFunction::constant(0.5), SpectralFunction::constant(2.0),
                      SpectralFunction::constant(3.0), 1) == doctest::Approx(expect).epsilon(1e-14));

  // Wishart coefficients: the drift equals the positivity bound
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 15;
    const auto lam = random_spectrum(rng, n, 0.1, 3.0);
    const auto e = elementary_symmetric(lam);
    const double c3 = uniform(rng, 0.0, 60.0);
    for (int beta : {1, 2}) {
      const double bound = e[n - 1] / (n * e[n]) * (c3 - (beta * (n - 1.0) + 2.0));
      const double d = log_det_drift(lam, SpectralFunction::sqrt_abs(), SpectralFunction::constant(1.0),
                                     SpectralFunction::constant(c3), beta);
      CHECK(d >= bound - 1e-9 * (1.0 + std::fabs(bound)));
    }
  }

  std::vector<double> bad{1.0, 0.0};
  CHECK_THROWS_AS(log_det_drift(bad, g, h, b, 2), DomainError);
}
