#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "semiweyl/errors.hpp"
#include "semiweyl/funcalc.hpp"
#include "support.hpp"

using namespace semiweyl;
using testing::trig_field;

namespace {

const MultiIndex P0{0}, P1{1}, P2{2};

SymbolSeries torus_series(bool with_a1) {
  PolySymbol a0 = field_symbol(trig_field({1.0, 0.2}, {}), P2) + field_symbol(trig_field({0.0, 1.0}, {0, 0.0, 0.5}), P0);
  PolySymbol a1(1, 1);
  if (with_a1) a1.add(P0, trig_field({}, {0.3, 0.5}));
  return {a0, a1};
}

Eigen::MatrixXcd random_hermitian(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return 0.25 * (m + m.adjoint());
}

}  // namespace

TEST_CASE("first resolvent coefficient") {
  auto rs = resolvent_symbols(torus_series(true), 2);
  CHECK(rs.coefficient(1, 1) == -coef_atom(1, 1));
  CHECK(rs.max_power(1) == 1);
}

TEST_CASE("resolvent of a Fourier multiplier is exact at order zero") {
  PolySymbol a0 = monomial_symbol(P2) + monomial_symbol(P0);
  auto rs = resolvent_symbols({a0, PolySymbol(1, 1)}, 3);
  for (int j = 1; j <= 3; ++j) CHECK(rs.max_power(j) < 1);
}

TEST_CASE("resolvent coefficient structure") {
  auto rs = resolvent_symbols(torus_series(true), 3);
  for (const auto& [jk, expr] : rs.d) {
    const auto [j, k] = jk;
    CHECK(k <= 2 * j - 1);
    for (const auto& [m, c] : expr.terms())
      for (const auto& [atom, power] : m) {
        if (atom.kind != SymAtom::Kind::coef) continue;
        CHECK(atom.eta.order() + atom.gamma.order() + atom.index <= j);
      }
  }
}

TEST_CASE("functional calculus symbols") {
  auto f = bump_profile(0.5, 1.5, 1.0);
  SUBCASE("a^f_1 = a_1 f'(a_0)") {
    auto rs = resolvent_symbols(torus_series(true), 1);
    auto af = funcalc_symbols(rs, 1);
    CHECK((af[1] - coef_atom(1, 1) * SymbolExpr::atom(SymAtom::outer(1, 1))).is_zero());
  }
  SUBCASE("a_1 = 0 gives a^f_1 = 0") {
    auto rs = resolvent_symbols(torus_series(false), 2);
    auto af = funcalc_symbols(rs, 2);
    SymbolEvaluator ev(rs.base);
    ev.prepare(af[1]);
    for (double x : {-1.0, 0.4})
      for (double p : {-0.6, 0.9}) CHECK(std::abs(ev.eval(af[1], x, p, {0.0, f.get()})) <= 1e-14);
  }
  SUBCASE("order beyond the series is refused") {
    auto rs = resolvent_symbols(torus_series(true), 1);
    CHECK_THROWS_AS(funcalc_symbols(rs, 2), DomainError);
  }
}

TEST_CASE("almost analytic extension") {
  auto f = bump_profile(0.5, 0.9);
  auto ext = almost_analytic_extend(f, 4, 0.5);
  for (double x : {-0.8, 0.0, 0.3, 0.7}) {
    CHECK(ext.value(x, 0.0).real() == doctest::Approx(f->eval(x)));
    CHECK(std::abs(ext.dbar(x, 0.0)) <= 1e-14);
  }
  // dbar f~ vanishes like |y|^n near the axis.
  const double r = std::abs(ext.dbar(0.7, 0.02)) / std::abs(ext.dbar(0.7, 0.01));
  CHECK(r == doctest::Approx(16.0).epsilon(1e-6));

  auto sq = almost_analytic_extend(polynomial_profile({0, 0, 1}), 2, 1.0);
  for (double y : {0.1, 0.5, 0.99}) CHECK(std::abs(sq.dbar(0.3, y)) <= 1e-14);
  CHECK_THROWS_AS(almost_analytic_extend(f, -1), DomainError);
}

TEST_CASE("Helffer-Sjoestrand formula") {
  auto f = bump_profile(0.5, 0.9);
  SUBCASE("diagonal matrix") {
    Eigen::MatrixXcd H = Eigen::Vector3cd(-1, 0, 1).asDiagonal();
    Eigen::MatrixXcd fh = hs_apply(H, f, 4);
    Eigen::MatrixXcd want = Eigen::Vector3cd(0, 1, 0).asDiagonal();
    CHECK((fh - want).cwiseAbs().maxCoeff() <= 1e-4);
  }
  SUBCASE("random Hermitian matrix") {
    Eigen::MatrixXcd H = random_hermitian(6, 20240607);
    HsReport rep;
    Eigen::MatrixXcd fh = hs_apply(H, f, 4, {}, &rep);
    CHECK(spectral_norm(fh - eig_apply(H, *f)) <= 1e-3);
    CHECK(hermitian_residual(fh) <= 1e-9);
    CHECK(rep.error_estimate <= 1e-6);
  }
  SUBCASE("zero function") {
    auto zero = std::make_shared<FunctionProfile>(
        "zero", [](const Jet& u) { return Jet(u.order(), 0.0); }, 64, std::pair{0.0, 0.0});
    Eigen::MatrixXcd H = random_hermitian(4, 3);
    CHECK(hs_apply(H, zero, 4).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("preconditions") {
    Eigen::MatrixXcd H = random_hermitian(4, 5);
    CHECK_THROWS_AS(hs_apply(H, f, 1), DomainError);
    Eigen::MatrixXcd A = H;
    A(0, 1) += 1.0;
    CHECK_THROWS_AS(hs_apply(A, f, 4), DomainError);
    CHECK_THROWS_AS(hs_apply(H, gaussian_profile(1.0), 4), DomainError);
  }
}

TEST_CASE("trace expansion terms") {
  auto f = bump_profile(0.5, 1.5, 1.0);
  SUBCASE("T_1 vanishes with a_1") {
    auto t = trace_expansion_terms(resolvent_symbols(torus_series(false), 1), f, 1);
    CHECK(std::abs(t[1]) <= 1e-12);
  }
  SUBCASE("T_0 for a Fourier multiplier") {
    auto rs = resolvent_symbols({monomial_symbol(P2), PolySymbol(1, 1)}, 1);
    auto t = trace_expansion_terms(rs, f, 1);
    const double want = 2 * std::numbers::pi * integrate_gl([&](double p) { return f->eval(p * p); }, -2, 2, 64);
    CHECK(t[0] == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("quantized functional calculus approximates f(H)") {
  auto f = gaussian_profile(1.0);
  auto series = torus_series(true);
  auto rs = resolvent_symbols(series, 1);
  std::vector<double> err0, err1;
  for (double h : {1.0 / 16, 1.0 / 32}) {
    PhaseGrid g{int(std::bit_ceil(unsigned(8 / h))), std::numbers::pi, h};
    auto H = weyl_quantize_series(series, g);
    Eigen::MatrixXcd fh = eig_apply(H.m, *f);
    err0.push_back(spectral_norm(fh - quantize_funcalc(rs, f, 0, g).m));
    err1.push_back(spectral_norm(fh - quantize_funcalc(rs, f, 1, g).m));
  }
  CHECK(err1[1] < err0[1]);
  CHECK(err1[0] / err1[1] >= 3.0);
}
