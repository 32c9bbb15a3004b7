#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rmflow/cauchy.hpp"
#include "rmflow/errors.hpp"

using namespace rmflow;

namespace {

const std::vector<cplx> kGrid{{0, 1}, {1, 1}, {0, 2}, {-1.5, 0.3}, {3.0, 0.01}, {0.2, 5.0}, {-4.0, 2.0}};

std::vector<LimitLaw> laws() {
  return {PointMass{0.4}, Semicircle{0.0, 1.0}, Semicircle{-0.5, 0.3}, MarchenkoPastur{1.0, 1.0, 1},
          MarchenkoPastur{0.4, 1.0, 2}, MpMixtureTwo{0.5, 1.0}, MpMixtureThree{2.0, 3.0, 1.0}};
}

}  // namespace

TEST_CASE("transform of a point mass") {
  for (cplx z : kGrid) {
    CHECK(std::abs(cauchy_transform(PointMass{0.0}, z) + 1.0 / z) <= 1e-15);
    CHECK(std::abs(cauchy_transform(EmpiricalMeasure({0.0}), z) + 1.0 / z) <= 1e-15);
  }
  // Poisson kernel
  const double a = 0.3, eps = 0.05;
  for (double x : {-1.0, 0.3, 0.31, 2.0}) {
    const double k = eps / ((x - a) * (x - a) + eps * eps) / std::numbers::pi;
    CHECK(cauchy_transform(PointMass{a}, {x, eps}).imag() / std::numbers::pi == doctest::Approx(k).epsilon(1e-14));
  }
  CHECK_THROWS_AS(cauchy_transform(PointMass{0.0}, cplx(1.0, 0.0)), DomainError);
  CHECK_THROWS_AS(cauchy_transform(Semicircle{}, cplx(1.0, -1.0)), DomainError);
  CHECK_THROWS_AS(cauchy_transform(GeometricLaw{}, cplx(0.0, 1.0)), UnsupportedOperation);
}

TEST_CASE("Herglotz invariants") {
  for (const auto& law : laws())
    for (cplx z : kGrid) {
      const cplx g = cauchy_transform(law, z);
      CHECK(g.imag() > 0.0);
      CHECK(std::abs(g) <= 1.0 / z.imag() * (1 + 1e-12));
    }
  const EmpiricalMeasure m({-2.0, 0.0, 0.5, 7.0});
  for (cplx z : kGrid) {
    CHECK(cauchy_transform(m, z).imag() > 0.0);
    CHECK(std::abs(cauchy_transform(m, z)) <= 1.0 / z.imag());
  }
}

TEST_CASE("closed-form semicircle against quadrature") {
  for (cplx z : kGrid) {
    CHECK(std::abs(free_bm_transform(0.0, 1.0, 1.0, z) - cauchy_transform(semicircle_law(1.0, 2), z)) <= 1e-10);
    const Semicircle s{0.7, 0.4};
    CHECK(std::abs(semicircle_transform(s, z) - cauchy_transform(s, z)) <= 1e-10);
  }
}

TEST_CASE("Laurent coefficients reproduce moments") {
  for (const auto& law : laws()) {
    const auto m = laurent_moments([&](cplx z) { return cauchy_transform(law, z); }, 50.0, 4);
    const auto exact = law_moments(law, 4);
    for (std::size_t k = 0; k <= 4; ++k) CHECK(std::fabs(m[k] - exact[k]) <= 1e-6);
  }
  const EmpiricalMeasure e({-1.0, 0.5, 2.0});
  const auto m = laurent_moments([&](cplx z) { return cauchy_transform(e, z); }, 50.0, 4);
  for (std::size_t k = 0; k <= 4; ++k) CHECK(std::fabs(m[k] - moment(e, k)) <= 1e-6);
}

TEST_CASE("Stieltjes inversion") {
  const std::vector<double> eps{0.04, 0.02, 0.01, 0.005};
  SUBCASE("semicircle") {
    std::vector<double> x;
    for (int i = 0; i <= 380; ++i) x.push_back(-1.9 + 0.01 * i);
    const auto law = semicircle_law(1.0, 2);
    const auto d = stieltjes_invert([&](cplx z) { return cauchy_transform(law, z); }, x, eps);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      worst = std::max(worst, std::fabs(d[i] - std::sqrt(4.0 - x[i] * x[i]) / (2.0 * std::numbers::pi)));
    CHECK(worst <= 5e-3);
  }
  SUBCASE("MP at alpha = 1") {
    std::vector<double> x;
    for (int i = 0; i <= 380; ++i) x.push_back(0.1 + 0.01 * i);
    const LimitLaw law = MarchenkoPastur{1.0, 1.0, 1};
    const auto d = stieltjes_invert([&](cplx z) { return cauchy_transform(law, z); }, x, eps);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      worst = std::max(worst, std::fabs(d[i] - std::sqrt(x[i] * (4.0 - x[i])) / (2.0 * std::numbers::pi * x[i])));
    CHECK(worst <= 1e-2);
  }
  CHECK_THROWS_AS(stieltjes_invert([](cplx) { return cplx(); }, {0.0}, {0.1}), ValidationError);
  CHECK_THROWS_AS(stieltjes_invert([](cplx) { return cplx(); }, {0.0}, {0.1, 0.2}), ValidationError);
}

TEST_CASE("Cauchy transform evolution") {
  const auto zero = SpectralFunction::zero();
  CHECK(ct_evolution_rhs(Semicircle{}, {0, 1}, zero, zero, zero) == cplx(0.0));
  const double dt = 1e-4;
  SUBCASE("semicircle family") {
    const auto g2 = SpectralFunction::constant(0.25), h2 = SpectralFunction::constant(1.0);
    for (int beta : {1, 2})
      for (cplx z : {cplx(0, 1), cplx(1, 1), cplx(0, 2)}) {
        const cplx fd = (cauchy_transform(semicircle_law(1 + dt, beta), z) -
                         cauchy_transform(semicircle_law(1 - dt, beta), z)) / (2 * dt);
        CHECK(std::abs(fd - ct_evolution_rhs(semicircle_law(1.0, beta), z, g2, h2, zero, beta)) <= 1e-4);
      }
  }
  SUBCASE("MP family") {
    const auto g2 = SpectralFunction::identity(), h2 = SpectralFunction::constant(1.0);
    for (int beta : {1, 2})
      for (double alpha : {1.0, 2.5})
        for (cplx z : {cplx(0, 1), cplx(1, 1), cplx(0, 2)}) {
          const auto law = [&](double t) { return LimitLaw{MarchenkoPastur{alpha, t, beta}}; };
          const cplx fd = (cauchy_transform(law(1 + dt), z) - cauchy_transform(law(1 - dt), z)) / (2 * dt);
          const cplx rhs = ct_evolution_rhs(law(1.0), z, g2, h2, SpectralFunction::constant(alpha), beta);
          CHECK(std::abs(fd - rhs) <= 1e-4);
        }
  }
  SUBCASE("empirical overload agrees with atom sums") {
    const EmpiricalMeasure m({0.5, 1.0, 2.0});
    const auto g2 = SpectralFunction::identity(), h2 = SpectralFunction::constant(2.0);
    const auto b = SpectralFunction::constant(0.7);
    const cplx z(0.3, 0.9);
    cplx b2 = 0, g1 = 0, gg = 0, h1 = 0, hh = 0;
    for (double x : m.atoms()) {
      b2 += 0.7 / ((x - z) * (x - z)) / 3.0;
      g1 += x / (x - z) / 3.0;
      gg += x / ((x - z) * (x - z)) / 3.0;
      h1 += 2.0 / (x - z) / 3.0;
      hh += 2.0 / ((x - z) * (x - z)) / 3.0;
    }
    CHECK(std::abs(ct_evolution_rhs(m, z, g2, h2, b, 2.0) - (-b2 + 2.0 * (g1 * hh + gg * h1))) <= 1e-14);
  }
}

TEST_CASE("free Brownian motion") {
  for (cplx z : kGrid) {
    // shift covariance
    CHECK(std::abs(free_bm_transform(0.8, 1.3, 0.7, z) - free_bm_transform(0.0, 1.3, 0.7, z - 0.8 * 0.7)) <= 1e-13);
    CHECK(free_bm_transform(0.8, 1.3, 0.7, z).imag() > 0.0);
  }
  // normalization at infinity
  const cplx big(3e4, 4e4);
  CHECK(std::abs(big * free_bm_transform(0.5, 1.0, 1.0, big) + 1.0) <= 1e-4);
  CHECK(std::abs(free_bm_transform(0.0, 0.0, 1.0, cplx(0, 1)) + 1.0 / cplx(0, 1)) <= 1e-15);
  CHECK_THROWS_AS(free_bm_transform(0.0, 1.0, 0.0, cplx(0, 1)), ValidationError);

  for (cplx z : {cplx(0, 2), cplx(1, 1), cplx(-0.5, 0.5)}) {
    CHECK(free_pde_residual({FreeCase::free_bm, 0.0, 1.0}, 1.0, z, 1e-4) <= 1e-4);
    CHECK(free_pde_residual({FreeCase::free_bm, 0.7, 1.5}, 0.5, z, 1e-4) <= 1e-4);
    CHECK(free_pde_residual({FreeCase::free_bm, 0.7, 0.0}, 0.5, z, 1e-4) <= 1e-7);
  }
}

TEST_CASE("free Ornstein-Uhlenbeck") {
  // theta -> 0 recovers free BM
  for (cplx z : kGrid)
    CHECK(std::abs(free_ou_transform(1e-9, 1.2, 0.8, z) - free_bm_transform(0.0, 1.2, 0.8, z)) <= 1e-8);
  const double r2 = 4.0 * free_ou_law(1e-7, 1.0, 2.0).variance;
  CHECK(r2 == doctest::Approx(4.0 * 2.0).epsilon(1e-6));
  // stated radii
  CHECK(4.0 * free_ou_law(0.5, 1.1, 0.9).variance ==
        doctest::Approx(2.0 * 1.21 * (std::exp(0.9) - 1.0) / 0.5));
  CHECK(4.0 * free_ou_law(-0.5, 1.1, 0.9).variance ==
        doctest::Approx(2.0 * 1.21 * (1.0 - std::exp(-0.9)) / 0.5));
  // stationary radius for theta = -1, sigma = 1
  CHECK(std::sqrt(4.0 * free_ou_law(-1.0, 1.0, 50.0).variance) == doctest::Approx(std::sqrt(2.0)));
  for (cplx z : kGrid) CHECK(free_ou_transform(-1.0, 1.0, 3.0, z).imag() > 0.0);

  for (double theta : {-1.0, 0.5})
    for (cplx z : {cplx(0, 2), cplx(1, 1), cplx(0.3, 0.6)}) {
      CHECK(free_pde_residual({FreeCase::free_ou, theta, 1.0}, 1.0, z, 1e-4) <= 1e-4);
      CHECK(free_pde_residual({FreeCase::free_ou, theta, 0.0}, 1.0, z, 1e-4) <= 1e-7);
    }
}

TEST_CASE("diffusion convention") {
  // g = h = sigma / 2 does not solve the evolution; g^2 = h^2 = sigma / sqrt 2 does
  const FreeDiffusion c{FreeCase::free_bm, 0.0, 1.0};
  const cplx z(0, 2);
  const cplx fd = (c.transform(1 + 1e-4, z) - c.transform(1 - 1e-4, z)) / 2e-4;
  const auto quarter = SpectralFunction::constant(0.25);
  const cplx wrong = ct_evolution_rhs(LimitLaw{c.law(1.0)}, z, quarter, quarter, c.b(), 1.0);
  CHECK(std::abs(fd - wrong) > 1e-2);
  CHECK(free_pde_residual(c, 1.0, z, 1e-4) <= 1e-4);
}
