#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "semiweyl/errors.hpp"
#include "semiweyl/function_profile.hpp"
#include "semiweyl/quantize.hpp"
#include "semiweyl/symcalc.hpp"
#include "support.hpp"

using namespace semiweyl;
using testing::poly_field;
using testing::trig_field;

namespace {

const MultiIndex P0{0}, P1{1}, P2{2};

// Largest |a - b| over a fixed set of phase-space points.
double sampled_distance(const PolySymbol& a, const PolySymbol& b) {
  double d = 0.0;
  for (double x : {-2.1, -0.7, 0.0, 0.4, 1.9})
    for (double p : {-1.5, -0.2, 0.6, 2.3}) d = std::max(d, std::abs(a.eval(x, p) - b.eval(x, p)));
  return d;
}

PolySymbol symbol_from(std::vector<std::pair<int, FieldPtr>> terms) {
  PolySymbol s(1);
  for (auto& [k, f] : terms) s.add(MultiIndex{k}, f);
  return s;
}

PhaseGrid grid64(double hbar) { return PhaseGrid{64, std::numbers::pi, hbar}; }

double matrix_distance(const OperatorMatrix& a, const OperatorMatrix& b) { return (a.m - b.m).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("symbol evaluation") {
  CHECK(monomial_symbol(P2).eval(0.3, 2.0) == cplx(4.0));
  CHECK(field_symbol(poly_field({1, 0, 1}), P2).eval(1.0, 1.0).real() == doctest::Approx(2.0));
  PolySymbol a = monomial_symbol(P2) + field_symbol(trig_field({}, {0, 2.0}), P1) + monomial_symbol(P0);
  CHECK(std::abs(a.eval(std::numbers::pi / 2, -1.0)) <= 1e-14);
}

TEST_CASE("derivatives in p are exact and in x use the field") {
  auto c = trig_field({0, 1.0}, {});
  PolySymbol a = field_symbol(c, MultiIndex{3});
  CHECK(a.order() == 3);
  CHECK(a.d_p(0).eval(0.2, 1.5).real() == doctest::Approx(3.0 * std::cos(0.2) * 1.5 * 1.5));
  CHECK(a.d_x(0).eval(0.2, 1.5).real() == doctest::Approx(-std::sin(0.2) * std::pow(1.5, 3)));
  CHECK(a.d_p(0).d_p(0).d_p(0).d_p(0).is_zero());
}

TEST_CASE("canonical commutation") {
  auto X = poly_field({0, 1});
  auto px = moyal_terms(monomial_symbol(P1), field_symbol(X, P0), 0.5, 3);
  auto xp = moyal_terms(field_symbol(X, P0), monomial_symbol(P1), 0.5, 3);
  CHECK(px[1].eval(0.3, 0.7) == cplx(0, -0.5));
  CHECK(px[2].is_zero());
  CHECK(px[3].is_zero());
  CHECK(sampled_distance(px[0], field_symbol(X, P1)) <= 1e-14);
  CHECK(px[1].eval(0.3, 0.7) - xp[1].eval(0.3, 0.7) == cplx(0, -1));
  // Left and right quantization of x hD.
  CHECK(moyal_terms(field_symbol(X, P0), monomial_symbol(P1), 0.0, 2)[1].is_zero());
  CHECK(moyal_terms(field_symbol(X, P0), monomial_symbol(P1), 1.0, 2)[1].eval(0.0, 0.0) == cplx(0, 1));
}

TEST_CASE("x-independent symbols compose exactly") {
  for (double t : {0.0, 0.5, 1.0}) {
    auto c = moyal_terms(monomial_symbol(P2), monomial_symbol(P2), t, 4);
    CHECK(sampled_distance(c[0], monomial_symbol(MultiIndex{4})) == 0.0);
    for (int j = 1; j <= 4; ++j) CHECK(c[j].is_zero());
  }
}

TEST_CASE("Weyl composition agrees with the operator product") {
  auto V = trig_field({0, 1.0}, {0, 0, 0.5});
  auto c = moyal_terms(field_symbol(V, P0), monomial_symbol(P2), 0.5, 3);
  CHECK(c[2].eval(0.4, 1.0).real() == doctest::Approx(-0.25 * (-std::cos(0.4) - 2.0 * std::sin(0.8))));
  CHECK(c[3].is_zero());
  const double h = 0.05;
  auto g = grid64(h);
  OperatorMatrix prod = weyl_quantize_on_torus(field_symbol(V, P0), g);
  prod.m = prod.m * weyl_quantize_on_torus(monomial_symbol(P2), g).m;
  CHECK(matrix_distance(prod, weyl_quantize_series({c[0], c[1], c[2]}, g)) <= 1e-10);
}

TEST_CASE("composition is associative through order 3") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  auto rnd = [&] {
    return symbol_from({{0, trig_field({u(rng), u(rng)}, {0, u(rng)})},
                        {1, trig_field({u(rng)}, {0, u(rng)})},
                        {2, trig_field({1.0 + 0.2 * u(rng), 0.3 * u(rng)}, {})}});
  };
  const SymbolSeries a{rnd()}, b{rnd()}, c{rnd()};
  for (double t : {0.0, 0.5}) {
    auto left = compose_series(compose_series(a, b, t, 3), c, t, 3);
    auto right = compose_series(a, compose_series(b, c, t, 3), t, 3);
    for (int j = 0; j <= 3; ++j) CHECK(sampled_distance(left[j], right[j]) <= 1e-11);
  }
}

TEST_CASE("Weyl composition of real symbols has the conjugation pattern") {
  PolySymbol a = symbol_from({{0, trig_field({0.2, 1.0}, {})}, {2, trig_field({1.0}, {0, 0.3})}});
  PolySymbol b = symbol_from({{1, trig_field({}, {0.5, 0.7})}, {3, trig_field({0.1, 0.4}, {})}});
  auto ab = moyal_terms(a, b, 0.5, 4);
  auto ba = moyal_terms(b, a, 0.5, 4);
  for (int j = 0; j <= 4; ++j)
    for (double x : {-1.0, 0.5})
      for (double p : {-0.8, 1.3}) {
        const cplx l = ab[j].eval(x, p), r = ba[j].eval(x, p);
        CHECK(std::abs(l - std::conj(r)) <= 1e-12);
        CHECK(std::abs(l - (j % 2 ? -r : r)) <= 1e-12);
      }
}

TEST_CASE("requantize from left to Weyl") {
  auto c = trig_field({0.5, 1.0}, {0, 0.3});
  auto r = requantize({field_symbol(c, P1)}, 0.0, 0.5, 2);
  CHECK(r[1].eval(0.7, 2.0) == cplx(0, 0.5 * c->deriv1(1, 0.7)));
  CHECK(r[2].is_zero());
  // Operator oracle: c(x) hD is Op_W(c p + (i hbar / 2) c').
  const double h = 0.1;
  auto g = grid64(h);
  auto left = t_quantize_on_torus(field_symbol(c, P1), 0.0, g);
  CHECK(matrix_distance(left, weyl_quantize_series({r[0], r[1]}, PhaseGrid{64, std::numbers::pi, h})) <= 1e-10);
  auto pure = requantize({field_symbol(c, P0)}, 0.0, 1.0, 3);
  CHECK(sampled_distance(pure[0], field_symbol(c, P0)) == 0.0);
  for (int j = 1; j <= 3; ++j) CHECK(pure[j].is_zero());
}

TEST_CASE("requantize round trip") {
  PolySymbol b = symbol_from({{1, trig_field({0.1, 0.4}, {0, 0.2})}, {3, trig_field({1.0}, {0, 0.5})}});
  for (auto [t1, t2] : {std::pair{0.0, 0.5}, std::pair{0.5, 1.0}, std::pair{1.0, 0.0}}) {
    auto back = requantize(requantize({b}, t1, t2, 4), t2, t1, 4);
    CHECK(sampled_distance(back[0], b) <= 1e-12);
    for (int j = 1; j <= 4; ++j) CHECK(sampled_distance(back[j], PolySymbol(1)) <= 1e-12);
  }
}

TEST_CASE("requantize needs the field's derivatives") {
  FieldParams p;
  p.k = 0;
  p.mu = 0.5;
  auto rough = make_test_field(FieldFamily::abs_power, p);
  CHECK_THROWS_AS(requantize({field_symbol(rough, P2)}, 0.0, 0.5, 2), DomainError);
}

TEST_CASE("subprincipal symbol of forms") {
  auto a = trig_field({2.0, 0.5}, {});
  auto g = trig_field({}, {0, 0.5});
  Form divergence{{P1, P1, a, 1.0}};
  CHECK(subprincipal_from_form(divergence).is_zero());

  Form mixed{{P1, P1, a, 1.0}, {P0, P1, g, cplx(0, 1)}, {P1, P0, g, cplx(0, -1)}};
  PolySymbol a1 = subprincipal_from_form(mixed);
  for (double x : {-1.0, 0.3, 2.0}) CHECK(a1.eval(x, 0.9).real() == doctest::Approx(-g->deriv1(1, x)));

  // i g hD - i hD g = -hbar g' as an operator.
  const double h = 0.05;
  auto grid = grid64(h);
  auto direct = form_on_torus(mixed, grid);
  auto weyl = weyl_quantize_series(weyl_symbol_of_form(mixed), grid);
  CHECK(matrix_distance(direct, weyl) <= 1e-10);

  Form constants{{P1, P1, constant_field(2.0), 1.0},
                 {P0, P1, constant_field(0.5), cplx(0, 1)},
                 {P1, P0, constant_field(0.5), cplx(0, -1)}};
  CHECK(sampled_distance(subprincipal_from_form(constants), PolySymbol(1)) == 0.0);
}

TEST_CASE("Faa di Bruno derivatives match finite differences") {
  auto c2 = trig_field({1.0, 0.3}, {});
  auto c0 = trig_field({0.0, 1.0}, {0, 0.5});
  PolySymbol a0 = field_symbol(c2, P2) + field_symbol(c0, P0);
  auto f = gaussian_profile(1.0);
  SymbolEvaluator ev({a0});
  const double x = 0.4, p = 0.8, d = 1e-3;
  auto F = [&](double xx, double pp) { return f->eval(a0.eval(xx, pp).real()); };

  auto e_xp = faa_di_bruno_expand(0, coef_atom(0, 1), P1, P1);
  ev.prepare(e_xp);
  const double fd_xp = (F(x + d, p + d) - F(x + d, p - d) - F(x - d, p + d) + F(x - d, p - d)) / (4 * d * d);
  CHECK(ev.eval(e_xp, x, p, {0.0, f.get()}).real() == doctest::Approx(fd_xp).epsilon(1e-5));

  auto e_xx = faa_di_bruno_expand(0, coef_atom(0, 1), P2, P0);
  ev.prepare(e_xx);
  const double fd_xx = (F(x + d, p) - 2 * F(x, p) + F(x - d, p)) / (d * d);
  CHECK(ev.eval(e_xx, x, p, {0.0, f.get()}).real() == doctest::Approx(fd_xx).epsilon(1e-5));
}

TEST_CASE("Faa di Bruno monomials carry the total derivative order") {
  for (int ax = 0; ax <= 3; ++ax)
    for (int bp = 0; bp <= 3; ++bp) {
      if (ax + bp == 0) continue;
      auto e = faa_di_bruno_expand(0, coef_atom(0, 1), MultiIndex{ax}, MultiIndex{bp});
      for (const auto& [m, c] : e.terms()) {
        CHECK(monomial_x_order(m) == ax);
        CHECK(monomial_p_order(m) == bp);
      }
    }
}

TEST_CASE("regularity deficit counts hbar order and x derivatives") {
  SymbolExpr e = SymbolExpr::atom(SymAtom::coef(0, MultiIndex{2}, MultiIndex{0}));
  CHECK(regularity_deficit(e, 1.5) == doctest::Approx(0.5));
  SymbolExpr f = SymbolExpr::atom(SymAtom::coef(1, MultiIndex{1}, MultiIndex{1}));
  CHECK(regularity_deficit(f, 1.5) == doctest::Approx(0.5));
  CHECK(regularity_deficit(coef_atom(0, 1), 1.5) == 0.0);
}
