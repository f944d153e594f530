#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "semiweyl/asymptotics.hpp"
#include "semiweyl/errors.hpp"
#include "semiweyl/funcalc.hpp"
#include "support.hpp"

using namespace semiweyl;
using testing::poly_field;
using testing::schroedinger_symbol;

namespace {

constexpr double pi = std::numbers::pi;

PolySymbol disk() { return schroedinger_symbol(poly_field({0, 0, 1}), 1.0); }
PolySymbol quartic() { return schroedinger_symbol(poly_field({0, 0, 0, 0, 1}), 1.0); }

// 0.3 + 0.5 x^2 as an hbar^1 symbol.
PolySymbol weight_a1() {
  PolySymbol a1(1, 1);
  a1.add(MultiIndex{0}, poly_field({0.3, 0, 0.5}));
  return a1;
}

// Integral of that weight over the circle x^2 + p^2 = 1 + s against dS / |grad a_0|.
double weight_density(double s) { return 0.3 * pi + 0.25 * pi * (1 + s); }

Amplitude gaussian_amplitude() {
  return {[](const MultiIndex& m) {
            const int k = m[0];
            if (k % 2) return 0.0;
            double r = 1.0;
            for (int i = 1; i <= k / 2; ++i) r *= -(2.0 * i - 1);
            return r;
          },
          [](double v) { return std::exp(-v * v / 2); }, 9.0};
}

}  // namespace

TEST_CASE("phase-space volumes") {
  auto v = weyl_volume(disk(), 0.0);
  CHECK(std::abs(v.value - pi) <= 1e-6);

  double ref = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double a = -1.0 + k * 1e-3;
    ref += integrate_gl([](double x) { return 2 * std::sqrt(std::max(0.0, 1 - std::pow(x, 4))); }, a, a + 1e-3, 1, 12);
  }
  CHECK(std::abs(weyl_volume(quartic(), 0.0).value - ref) <= 1e-5);
  CHECK(FiberIntegrator(quartic()).volume(0.0) == doctest::Approx(ref).epsilon(1e-6));

  CHECK(weyl_volume(disk(), -1.5).value == 0.0);
}

TEST_CASE("volume shift identity") {
  for (double c : {-0.4, 0.25, 0.8}) {
    PolySymbol shifted = quartic();
    shifted.add_constant(MultiIndex{0}, -c);
    CHECK(weyl_volume(shifted, 0.0).value == doctest::Approx(weyl_volume(quartic(), c).value).epsilon(1e-9));
  }
}

TEST_CASE("certified region encloses the sublevel set") {
  auto r = certify_region(quartic(), 0.0);
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    const double x = r.x_lo + t * (r.x_hi - r.x_lo), p = r.p_lo + t * (r.p_hi - r.p_lo);
    CHECK(quartic().eval(x, r.p_lo).real() > 0.0);
    CHECK(quartic().eval(x, r.p_hi).real() > 0.0);
    CHECK(quartic().eval(r.x_lo, p).real() > 0.0);
    CHECK(quartic().eval(r.x_hi, p).real() > 0.0);
  }
}

TEST_CASE("Riesz phase-space terms") {
  for (double g : {0.25, 0.5, 1.0}) {
    auto t = riesz_phase_terms(disk(), PolySymbol(1, 1), g);
    CHECK(t.psi0 == doctest::Approx(pi / (1 + g)).epsilon(1e-8));
    CHECK(t.psi1 == 0.0);
  }
  CHECK(riesz_phase_terms(disk(), PolySymbol(1, 1), 1.0).psi0 == doctest::Approx(pi / 2).epsilon(1e-10));

  // Psi_1 is the derivative of Psi_0 under a_0 -> a_0 + hbar c.
  PolySymbol c(1, 1);
  c.add_constant(MultiIndex{0}, 0.3);
  for (double g : {0.5, 1.0}) {
    const double psi1 = riesz_phase_terms(disk(), c, g).psi1;
    const double t = 1e-4;
    PolySymbol up = disk(), down = disk();
    up.add_constant(MultiIndex{0}, 0.3 * t);
    down.add_constant(MultiIndex{0}, -0.3 * t);
    const double fd = (riesz_phase_terms(up, PolySymbol(1, 1), g).psi0 - riesz_phase_terms(down, PolySymbol(1, 1), g).psi0) / (2 * t);
    CHECK(psi1 == doctest::Approx(fd).epsilon(1e-5));
    CHECK(psi1 == doctest::Approx(-0.3 * pi).epsilon(1e-6));
  }
}

TEST_CASE("Psi_0 decreases in gamma when |a_0| <= 1 on the sublevel set") {
  double prev = 1e300;
  for (double g : {0.25, 0.5, 0.75, 1.0}) {
    const double v = riesz_phase_terms(disk(), PolySymbol(1, 1), g).psi0;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("layer cake agrees with the fiber formula") {
  for (double g : {0.5, 1.0})
    CHECK(riesz_psi0_layer_cake(disk(), g, 24, {1e-6}) == doctest::Approx(pi / (1 + g)).epsilon(1e-3));
}

TEST_CASE("coarea densities") {
  const PolySymbol one = monomial_symbol(MultiIndex{0});
  for (double s : {-0.3, 0.0, 0.3}) CHECK(std::abs(coarea_density(disk(), one, s) - pi) <= 1e-3);

  const double s = 0.2;
  CHECK(coarea_density(2.0 * disk(), one, 2 * s) == doctest::Approx(0.5 * coarea_density(disk(), one, s)).epsilon(1e-6));

  for (double t : {-0.4, 0.1, 0.5}) CHECK(coarea_density(disk(), weight_a1(), t) == doctest::Approx(weight_density(t)).epsilon(1e-6));

  FiberIntegrator fi(quartic());
  const double s0 = -0.2, s1 = 0.4;
  const double integral = integrate_gl([&](double u) { return coarea_density(quartic(), one, u); }, s0, s1, 4, 8);
  CHECK(integral == doctest::Approx(fi.volume(s1) - fi.volume(s0)).epsilon(1e-3));
}

TEST_CASE("first trace term matches the weighted level-set density") {
  auto f = bump_profile(0.3, 0.6);
  PolySymbol a0 = disk();
  auto rs = resolvent_symbols({a0, weight_a1()}, 1);
  PhaseQuadrature quad;
  quad.x_lo = -2.0;
  quad.x_hi = 2.0;
  auto t = trace_expansion_terms(rs, f, 1, quad);
  auto df = [&](double s) { return f->deriv(1, s) * weight_density(s); };
  const double want = integrate_gl(df, -0.6, -0.3, 8) + integrate_gl(df, 0.3, 0.6, 8);
  CHECK(t[1] == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("stationary phase") {
  SUBCASE("Gaussian amplitude against the closed form") {
    const double h = 0.05;
    Eigen::MatrixXd B(1, 1);
    B(0, 0) = 1.0;
    auto e = stationary_phase_expand(B, gaussian_amplitude(), h, 2);
    const cplx exact = std::sqrt(2 * pi / cplx(1.0, -1.0 / h));
    CHECK(std::abs(e.value() - exact) <= 2.0 * std::pow(h, 3.5));
    CHECK(e.remainder_estimate == doctest::Approx(std::abs(e.value() - exact)).epsilon(1e-3));
  }
  SUBCASE("odd amplitude") {
    Amplitude odd{[](const MultiIndex& m) { return m[0] % 2 ? 1.0 : 0.0; }, [](double v) { return v * std::exp(-v * v); },
                  8.0};
    Eigen::MatrixXd B(1, 1);
    B(0, 0) = 2.0;
    auto e = stationary_phase_expand(B, odd, 0.1, 3);
    for (auto [j, c] : e.terms) CHECK(c == cplx(0.0));
  }
  SUBCASE("signature zero") {
    Eigen::MatrixXd B = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    Amplitude a{[](const MultiIndex& m) { return m.order() == 0 ? 1.0 : 0.0; }, nullptr, 1.0};
    auto e = stationary_phase_expand(B, a, 0.1, 0);
    CHECK(std::abs(e.terms[0].second - cplx(2 * pi * 0.1)) <= 1e-14);
  }
  SUBCASE("singular B is refused") {
    Eigen::MatrixXd B = Eigen::Vector2d(1.0, 0.0).asDiagonal();
    CHECK_THROWS_AS(stationary_phase_expand(B, gaussian_amplitude(), 0.1, 1), DomainError);
  }
}
