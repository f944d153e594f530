#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "semiweyl/errors.hpp"
#include "semiweyl/quantize.hpp"
#include "semiweyl/spectra.hpp"
#include "support.hpp"

using namespace semiweyl;
using testing::trig_field;

namespace {

const MultiIndex P0{0}, P1{1}, P2{2};

// (p + sin x)^2 + cos^2 x = p^2 + 2 sin(x) p + 1.
PolySymbol shifted_momentum() {
  return monomial_symbol(P2) + field_symbol(trig_field({}, {0, 2.0}), P1) + monomial_symbol(P0);
}

PhaseGrid grid(int n, double hbar) { return PhaseGrid{n, std::numbers::pi, hbar}; }

}  // namespace

TEST_CASE("phase grid validation") {
  CHECK_NOTHROW(grid(64, 0.1).validate());
  CHECK_THROWS_AS(grid(48, 0.1).validate(), DomainError);
  CHECK_THROWS_AS(grid(64, 0.0).validate(), DomainError);
  auto g = grid(64, 0.1);
  CHECK(g.hx() == doctest::Approx(2 * std::numbers::pi / 64));
  CHECK(g.momentum(g.n / 2) == 0.0);
  CHECK(g.p_max() == doctest::Approx(0.1 * 32));
}

TEST_CASE("constant symbol quantizes to the identity") {
  auto op = weyl_quantize_on_torus(monomial_symbol(P0), grid(32, 0.2));
  CHECK((op.m - Eigen::MatrixXcd::Identity(32, 32)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("real symbols give Hermitian matrices") {
  auto op = weyl_quantize_on_torus(shifted_momentum(), grid(64, 0.05));
  CHECK(op.hermitian_residual <= 1e-10);
  CHECK(op.aliasing_estimate <= 1e-11);
}

TEST_CASE("left and right quantizations are adjoint") {
  PolySymbol a = field_symbol(trig_field({0.3, 1.0}, {0, 0.4}), P1) + field_symbol(trig_field({1.0}, {0, 0.2}), P2);
  auto g = grid(32, 0.1);
  auto left = t_quantize_on_torus(a, 0.0, g);
  auto right = t_quantize_on_torus(a, 1.0, g);
  CHECK((left.m.adjoint() - right.m).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(t_quantize_on_torus(a, 0.25, g), DomainError);
}

TEST_CASE("trace identities") {
  auto g = grid(64, 0.1);
  CHECK(std::abs(trace_of_quantization(monomial_symbol(P0), g) - cplx(64.0)) <= 1e-12);
  CHECK(std::abs(trace_of_quantization(field_symbol(trig_field({}, {0, 1.0}), P1), g)) <= 1e-10);

  PolySymbol a = field_symbol(trig_field({1.0, 0.5}, {}), P2) + field_symbol(trig_field({}, {0, 0, 1.0}), P0);
  cplx phase_sum = 0.0;
  for (int j = 0; j < g.n; ++j)
    for (int q = 0; q < g.n; ++q) phase_sum += a.eval(g.x(j), g.momentum(q));
  CHECK(std::abs(trace_of_quantization(a, g) - phase_sum / double(g.n)) <= 1e-9);
}

TEST_CASE("position basis change is a unitary similarity") {
  auto g = grid(32, 0.1);
  auto op = weyl_quantize_on_torus(shifted_momentum(), g);
  Eigen::MatrixXcd pos = to_position_basis(op.m);
  CHECK(std::abs(pos.trace() - op.m.trace()) <= 1e-10);
  CHECK(pos.norm() == doctest::Approx(op.m.norm()).epsilon(1e-12));
  CHECK(hermitian_residual(pos) <= 1e-10);
  Eigen::MatrixXcd id = to_position_basis(Eigen::MatrixXcd::Identity(32, 32));
  CHECK((id - Eigen::MatrixXcd::Identity(32, 32)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("form on the torus equals the Weyl quantization of its principal part for divergence forms") {
  auto a = trig_field({2.0, 0.5}, {});
  Form form{{P1, P1, a, 1.0}};
  auto g = grid(64, 0.05);
  auto direct = form_on_torus(form, g);
  CHECK(direct.hermitian_residual <= 1e-10);
  // hD a hD = Op_W(a p^2 + hbar^2 a'' / 4).
  PolySymbol corr = field_symbol(a, P0).d_x(0).d_x(0) * cplx(0.25);
  auto weyl = weyl_quantize_series({principal_symbol(form), PolySymbol(1), corr}, g);
  CHECK((direct.m - weyl.m).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("Garding bounds") {
  std::vector<PhaseGrid> grids{grid(64, 0.2), grid(128, 0.1), grid(256, 0.05)};
  auto free = garding_check(monomial_symbol(P2), grids, 1.0);
  CHECK(free.nonnegative_everywhere);
  for (double e : free.min_eig) CHECK(e >= -1e-12);

  auto zero = weyl_quantize_on_torus(PolySymbol(1), grids[0]);
  CHECK(min_eigenvalue(zero) == 0.0);

  auto sm = garding_check(shifted_momentum(), grids, 1.0);
  CHECK(sm.worst_bound_ratio <= 1.0);
  for (std::size_t i = 0; i < grids.size(); ++i) CHECK(sm.min_eig[i] >= -grids[i].hbar);

  PolySymbol negative = monomial_symbol(P2) - monomial_symbol(P0);
  CHECK_THROWS_AS(garding_check(negative, grids, 1.0), DomainError);
}

TEST_CASE("binary matrix round trip") {
  auto op = weyl_quantize_on_torus(shifted_momentum(), grid(16, 0.25));
  std::stringstream ss;
  write_matrix_binary(op, ss);
  CHECK(ss.str().size() == 8 + 16 + 16 * 16 * 16);
  auto back = read_matrix_binary(ss);
  CHECK(back.grid.n == 16);
  CHECK(back.grid.hbar == 0.25);
  CHECK(back.m == op.m);

  std::stringstream cut(ss.str().substr(0, 100));
  CHECK_THROWS_AS(read_matrix_binary(cut), ParseError);

  std::stringstream text;
  write_matrix_text(op, text);
  int lines = 0;
  for (std::string l; std::getline(text, l);) ++lines;
  CHECK(lines == 17);
}

TEST_CASE("Dirichlet Laplacian on [0, pi]") {
  Form lap{{P1, P1, constant_field(1.0), 1.0}};
  auto op = assemble_form_operator(lap, IntervalGrid{0.0, std::numbers::pi, 999}, 1.0);
  CHECK(op.symmetry_residual <= 1e-12);
  auto T = op.real_form();
  CHECK(sturm_count_below(T, 10.5) == 3);
  auto e = eigenvalues_below(T, 26.0);
  REQUIRE(e.size() == 5);
  for (int k = 1; k <= 5; ++k) CHECK(e[k - 1] == doctest::Approx(k * k).epsilon(1e-4));
}

TEST_CASE("mixed form operator is symmetric and its real form is unitarily equivalent") {
  auto g = trig_field({}, {0, 0.5});
  Form form{{P1, P1, constant_field(1.0), 1.0},
            {P0, P1, g, cplx(0, 1)},
            {P1, P0, g, cplx(0, -1)},
            {P0, P0, testing::poly_field({-1, 0, 1}), 1.0}};
  auto op = assemble_form_operator(form, IntervalGrid{-2.5, 2.5, 200}, 0.05);
  CHECK(op.symmetry_residual <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.dense(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(op.real_form().dense(), Eigen::EigenvaluesOnly);
  CHECK((es.eigenvalues() - er.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("low block and spectral norm") {
  auto g = grid(16, 0.1);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(16, 16);
  for (int i = 0; i < 16; ++i) m(i, i) = double(i - 8);
  CHECK(spectral_norm(m) == doctest::Approx(8.0));
  auto b = low_block(m, g);
  CHECK(b.rows() == 9);
  CHECK(spectral_norm(b) == doctest::Approx(4.0));
}

TEST_CASE("unitary dilation consistency") {
  // Op_W^hbar(a) on [-L, L) and Op_W^{hbar^delta}(a(eps x, lambda p)) on [-L / eps, L / eps) with
  // lambda = hbar^{1 - delta} / eps act identically on the mode indices.
  const double hbar = 0.01, delta = 0.5, eps = 0.5;
  const double lambda = std::pow(hbar, 1 - delta) / eps;
  auto c0 = trig_field({0.0, 1.0}, {0, 0, 0.5});
  auto c1 = trig_field({}, {0, 0.7});
  auto c2 = trig_field({1.0, 0.2}, {});
  PolySymbol a = field_symbol(c2, P2) + field_symbol(c1, P1) + field_symbol(c0, P0);
  PolySymbol scaled = field_symbol(dilated_field(c2, eps), P2, lambda * lambda) +
                      field_symbol(dilated_field(c1, eps), P1, lambda) + field_symbol(dilated_field(c0, eps), P0);
  auto op = weyl_quantize_on_torus(a, PhaseGrid{128, std::numbers::pi, hbar});
  auto dil = weyl_quantize_on_torus(scaled, PhaseGrid{128, std::numbers::pi / eps, std::pow(hbar, delta)});
  CHECK((op.m - dil.m).cwiseAbs().maxCoeff() <= 1e-6);
}
