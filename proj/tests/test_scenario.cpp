#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "semiweyl/errors.hpp"
#include "semiweyl/scenario.hpp"
#include "semiweyl/suites.hpp"

using namespace semiweyl;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream is(text);
  return parse_scenario(is, "test.cfg");
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

const char* kHarmonic = R"(
# two sweeps on the harmonic oscillator
[scenario]
name = small
suites = weyl-sweep, riesz-sweep
hbar = 0.04, 0.02
gamma = 1

[form]
term = 1 1 1 constant value=1
term = 0 0 1 smooth poly=-1,0,1
)";

std::size_t column(const Table& t, const std::string& name) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  REQUIRE(it != t.header.end());
  return static_cast<std::size_t>(it - t.header.begin());
}

}  // namespace

TEST_CASE("factor and list literals") {
  CHECK(parse_factor("2") == cplx(2.0));
  CHECK(parse_factor("-0.5") == cplx(-0.5));
  CHECK(parse_factor("i") == cplx(0, 1));
  CHECK(parse_factor("-i") == cplx(0, -1));
  CHECK(parse_factor("0.5i") == cplx(0, 0.5));
  CHECK_THROWS_AS(parse_factor("x"), ParseError);
  CHECK(parse_list("0.04, 0.02,0.01") == std::vector<double>{0.04, 0.02, 0.01});
  CHECK_THROWS_AS(parse_list("0.1, a"), ParseError);
}

TEST_CASE("field and profile specifications") {
  auto f = parse_field("abs_power k=1 mu=0.5 offset=1");
  CHECK(f->k() == 1);
  CHECK(f->eval(-4.0) == doctest::Approx(9.0));
  auto s = parse_field("smooth poly=1,0,1");
  CHECK(s->k() == 2);
  CHECK(s->mu() == 1.0);
  CHECK(s->eval(2.0) == doctest::Approx(5.0));
  CHECK(parse_field("constant value=3")->is_constant());
  CHECK(parse_field("smooth sin=0,0.5")->eval(std::numbers::pi / 2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(parse_field("fractal k=1"), ParseError);
  CHECK_THROWS_AS(parse_field("smooth poly"), ParseError);
  CHECK_THROWS_AS(parse_field("abs_power k=1 mu=2"), ParseError);

  auto b = parse_profile("bump plateau=0.3 cutoff=0.6");
  CHECK(b->eval(0.2) == 1.0);
  CHECK(b->eval(0.7) == 0.0);
  CHECK(parse_profile("gaussian width=2")->eval(0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_profile("bump plateau=0.6 cutoff=0.3"), ParseError);
}

TEST_CASE("scenario parsing") {
  Scenario sc = parse(kHarmonic);
  CHECK(sc.name == "small");
  CHECK(sc.suites == std::vector<std::string>{"weyl-sweep", "riesz-sweep"});
  CHECK(sc.domain == "interval");
  CHECK(sc.hbar == std::vector<double>{0.04, 0.02});
  CHECK(sc.form.size() == 2);
  CHECK(sc.mu() == 1.0);
  CHECK(sc.weyl_delta() == doctest::Approx(0.5));
  CHECK(sc.riesz_delta(1.0) == doctest::Approx(1.0 - 2.0 / 3.0));
  CHECK(sc.tolerance("weyl_abs", 7.0) == 7.0);
}

TEST_CASE("delta follows the roughest coefficient") {
  Scenario sc = parse(R"(
[scenario]
name = rough
[form]
term = 1 1 1 abs_power k=1 mu=0.5 sine_inner=1 offset=2
term = 0 1 i smooth sin=0,0.5
term = 1 0 -i smooth sin=0,0.5
[tolerances]
weyl_abs = 3
)");
  CHECK(sc.mu() == 0.5);
  CHECK(sc.weyl_delta() == doctest::Approx(1.0 / 3.0));
  CHECK(sc.riesz_delta(0.5) == doctest::Approx(1.0 - 1.5 / 2.5));
  CHECK(sc.tolerance("weyl_abs", 1.0) == 3.0);
  // Conjugate partners share one field.
  CHECK(sc.form[1].field == sc.form[2].field);
  CHECK_NOTHROW(check_form_symmetry(sc.form));

  Scenario fixed = parse("[scenario]\nname = f\ndelta = 0.25\n");
  CHECK(fixed.weyl_delta() == 0.25);
  CHECK(fixed.riesz_delta(1.0) == 0.25);
}

TEST_CASE("parse errors carry the line number") {
  CHECK(parse_error("[scenario]\nname = a\nbogus = 1\n").find("test.cfg:3:") != std::string::npos);
  CHECK(parse_error("[scenario]\nname = a\nhbar = 0.1, -0.2\n").find("positive") != std::string::npos);
  CHECK(parse_error("[scenario]\nname = a\n[form]\n\nterm = 2 0 1 constant value=1\n").find("test.cfg:5:") !=
        std::string::npos);
  CHECK(parse_error("name = a\n").find("test.cfg:1:") != std::string::npos);
  CHECK(parse_error("[form]\nterm = 1 1 1 constant value=1\n").find("[scenario]") != std::string::npos);
  CHECK(parse_error("[scenario]\nname = a\ngamma = 1.5\n").find("gamma") != std::string::npos);
  CHECK(parse_error("[scenario\n").find("unterminated") != std::string::npos);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.cfg"), ParseError);
}

TEST_CASE("unknown suites are rejected") {
  Scenario sc = parse(kHarmonic);
  CHECK_THROWS_AS(run_suite(sc, "no-such-suite"), ParseError);
  const auto& names = suite_names();
  CHECK(std::find(names.begin(), names.end(), "weyl-sweep") != names.end());
  CHECK(names.size() == 10);
}

TEST_CASE("number formatting") {
  CHECK(format_number(12.5) == "12.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("harmonic sweeps") {
  Scenario sc = parse(kHarmonic);
  SUBCASE("weyl-sweep") {
    auto r = run_suite(sc, "weyl-sweep");
    REQUIRE(r.tables.size() == 1);
    const Table& t = r.tables[0];
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][column(t, "hbar")] == "0.04");
    CHECK(std::stod(t.rows[0][column(t, "weyl_term")]) == doctest::Approx(12.5).epsilon(1e-6));
    // Spectrum 0.04 (2k + 1) - 1 <= 0 holds for k = 0..12.
    CHECK(t.rows[0][column(t, "count")] == "13");
    CHECK(r.slopes.count("err_count"));
    CHECK(r.pass());
  }
  SUBCASE("riesz-sweep") {
    auto r = run_suite(sc, "riesz-sweep");
    const Table& t = r.tables[0];
    REQUIRE(t.rows.size() == 2);
    const auto& row = t.rows[1];
    const double h = std::stod(row[column(t, "hbar")]);
    CHECK(h == 0.02);
    const double psi0 = std::stod(row[column(t, "psi0")]);
    CHECK(std::stod(row[column(t, "psi1")]) == 0.0);
    CHECK(psi0 == doctest::Approx(std::numbers::pi / 2).epsilon(1e-8));
    CHECK(std::stod(row[column(t, "two_term")]) == doctest::Approx(psi0 / (2 * std::numbers::pi * h)).epsilon(1e-10));
    const double exact = [&] {
      double s = 0.0;
      for (int k = 0; (2 * k + 1) * h <= 1.0; ++k) s += 1.0 - (2 * k + 1) * h;
      return s;
    }();
    CHECK(std::stod(row[column(t, "riesz")]) == doctest::Approx(exact).epsilon(1e-3));
  }
}
