#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "semiweyl/spectra.hpp"
#include "support.hpp"

using namespace semiweyl;

namespace {

Tridiagonal diag123() { return Tridiagonal{{1, 2, 3}, {0, 0}}; }

Tridiagonal harmonic(double hbar, int n = 2047) {
  Form form{{MultiIndex{1}, MultiIndex{1}, constant_field(1.0), 1.0},
            {MultiIndex{0}, MultiIndex{0}, testing::poly_field({-1, 0, 1}), 1.0}};
  return assemble_form_operator(form, IntervalGrid{-2.5, 2.5, n}, hbar).real_form();
}

Tridiagonal random_tridiagonal(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  Tridiagonal T;
  for (int i = 0; i < n; ++i) T.d.push_back(3 * u(rng));
  for (int i = 0; i + 1 < n; ++i) T.e.push_back(u(rng));
  return T;
}

}  // namespace

TEST_CASE("Sturm counts") {
  CHECK(sturm_count_below(diag123(), 2.5) == 2);
  CHECK(sturm_count_below(diag123(), 3.0) == 3);
  auto [lo, hi] = gershgorin_bounds(diag123());
  CHECK(sturm_count_below(diag123(), lo - 1.0) == 0);
  CHECK(sturm_count_below(diag123(), hi) == 3);
  auto e = eigenvalues_below(diag123(), 2.5);
  REQUIRE(e.size() == 2);
  CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("Sturm counts agree with dense eigenvalues") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    auto T = random_tridiagonal(40, seed);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.dense(), Eigen::EigenvaluesOnly);
    std::vector<double> thresholds;
    for (int i = 0; i <= 40; ++i) thresholds.push_back(-4.0 + 0.2 * i);
    auto N = counting_function(T, thresholds, 1.0);
    CHECK(N.monotone());
    for (auto [E, n] : N.samples) {
      const int dense = int((es.eigenvalues().array() <= E).count());
      CHECK(n == dense);
      auto e = eigenvalues_below(T, E);
      CHECK(int(e.size()) == n);
      for (int k = 0; k < n; ++k) CHECK(e[k] == doctest::Approx(es.eigenvalues()[k]).epsilon(1e-10));
    }
  }
}

TEST_CASE("harmonic oscillator spacing") {
  auto e = eigenvalues_below(harmonic(0.05), 0.0);
  REQUIRE(e.size() >= 5);
  for (std::size_t k = 0; k + 1 < 5; ++k) CHECK(std::abs(e[k + 1] - e[k] - 0.1) <= 2e-3);
}

TEST_CASE("Riesz means") {
  const std::vector<double> eigs{-1.0, -0.25, 0.5};
  CHECK(riesz_mean(eigs, 1.0) == doctest::Approx(1.25));
  CHECK(riesz_mean(eigs, 0.5) == doctest::Approx(1.5));

  const std::vector<double> gammas{0.0, 0.5, 1.0};
  auto s = spectral_sample(harmonic(0.02), 0.02, gammas);
  CHECK(s.riesz.at(0.0) == s.count);
  CHECK(s.riesz.at(1.0) == doctest::Approx(12.5).epsilon(0.03));
  CHECK(s.riesz.at(0.5) == doctest::Approx(riesz_mean(s.eigenvalues_below, 0.5)));
}

TEST_CASE("Riesz means agree with the layer cake of the counting function") {
  const double h = 0.05;
  auto T = harmonic(h, 1023);
  std::vector<double> thresholds;
  const int M = 40000;
  for (int i = 0; i <= M; ++i) thresholds.push_back(-1.0 + 1.0 * i / M);
  auto N = counting_function(T, thresholds, h);
  auto eigs = eigenvalues_below(T, 0.0);
  for (double g : {0.5, 1.0}) CHECK(riesz_layer_cake(N, g) == doctest::Approx(riesz_mean(eigs, g)).epsilon(1e-3));
}

TEST_CASE("smoothing kernel") {
  SmoothingKernel K(0.1, 1.0);
  CHECK(K.chi(0.0) == doctest::Approx(1.0));
  CHECK(K.chi(1.0) == 0.0);
  CHECK(K.chi(-1.2) == 0.0);
  CHECK(K.chi(0.3) == doctest::Approx(K.chi(-0.3)));
  for (int i = -40; i <= 40; ++i) {
    const double v = 0.5 * i;
    CHECK(K.chi_hat_unit(v) >= -1e-14);
    CHECK(K.chi_hat_unit(v) == doctest::Approx(K.chi_hat_unit(-v)));
  }
  CHECK(K.cumulative_unit(0.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(K.cumulative_unit(200.0) == doctest::Approx(1.0).epsilon(1e-10));
  // chi^_hbar has unit mass.
  const double mass = integrate_gl([&](double s) { return K.chi_hat(s); }, -20.0, 20.0, 400);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("smoothed density vanishes away from the spectrum") {
  SmoothingKernel K(0.01, 1.0);
  auto f = bump_profile(0.3, 0.6);
  const std::vector<double> far{5.0, 7.0};
  CHECK(smoothed_counting_density(far, K, *f, 0.0) == 0.0);
}

TEST_CASE("Tauberian gap") {
  SmoothingKernel K(0.01, 1.0);
  const std::vector<double> single{-3.0};
  CHECK(tauberian_gap(single, K, 0.0) <= 1e-12);

  auto eigs = eigenvalues_below(harmonic(0.02), 1.5);
  const double gap = tauberian_gap(eigs, SmoothingKernel(0.02, 1.0), 0.0);
  std::vector<double> shifted = eigs;
  for (double& e : shifted) e += 0.37;
  CHECK(tauberian_gap(shifted, SmoothingKernel(0.02, 1.0), 0.37) == doctest::Approx(gap).epsilon(1e-9));
  CHECK(gap <= 2.0);
}
