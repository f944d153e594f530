#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "semiweyl/function_profile.hpp"
#include "semiweyl/quantize.hpp"

namespace semiweyl {

// Eigenvalues within this distance of a threshold count as lying below it.
inline constexpr double kZeroBand = 1e-12;

// Number of eigenvalues <= E.
int sturm_count_below(const Tridiagonal& T, double E);
// Eigenvalues <= E refined by bisection to tol, ascending.
std::vector<double> eigenvalues_below(const Tridiagonal& T, double E, double tol = 1e-12);
// Enclosing interval from Gershgorin discs.
std::pair<double, double> gershgorin_bounds(const Tridiagonal& T);

struct CountingFunction {
  double hbar = 0.0;
  std::vector<std::pair<double, int>> samples;  // (E, N(E)) sorted by E

  bool monotone() const;
};

CountingFunction counting_function(const Tridiagonal& T, std::span<const double> thresholds, double hbar);

// sum over e_j <= 0 of (-e_j)^gamma for gamma in (0, 1].
double riesz_mean(std::span<const double> eigs, double gamma);
// gamma int_{-inf}^0 (-s)^{gamma - 1} N(s) ds with N replaced on each cell
// by the mean of its endpoint samples. Samples must start below the spectrum and reach 0.
double riesz_layer_cake(const CountingFunction& N, double gamma);

struct SpectralSample {
  double hbar = 0.0;
  int count = 0;
  std::map<double, double> riesz;  // gamma -> value; riesz[0] == count
  std::vector<double> eigenvalues_below;
};

SpectralSample spectral_sample(const Tridiagonal& T, double hbar, std::span<const double> gammas,
                               double tol = 1e-12);

// chi = psi * psi / ||psi||^2 with psi(t) = exp(-1 / (1 - (2t / T0)^2)), so
// chi(0) = 1, supp chi = [-T0, T0] and chi^ = |psi^|^2 / ||psi||^2 >= 0.
// chi^_hbar(s) = (2 pi hbar)^{-1} int chi(t) e^{i t s / hbar} dt.
class SmoothingKernel {
 public:
  explicit SmoothingKernel(double hbar, double T0 = 1.0);

  double hbar() const { return hbar_; }
  double T0() const { return T0_; }
  double chi(double t) const;
  // Unscaled transform chi^_1(v) = (2 pi)^{-1} int chi(t) e^{i t v} dt.
  double chi_hat_unit(double v) const;
  double chi_hat(double s) const { return chi_hat_unit(s / hbar_) / hbar_; }
  // int_{-inf}^{u} chi^_1.
  double cumulative_unit(double u) const;

 private:
  double psi_hat(double w) const;

  double hbar_;
  double T0_;
  double psi_norm2_ = 0.0;
  // Gauss nodes on [0, T0/2] and on [0, T0] with psi and chi(t)/t tabulated.
  std::vector<double> tp_, wp_, psi_;
  std::vector<double> tc_, wc_, chi_over_t_;
  double v_max_ = 0.0;
};

// sum_j f(e_j) chi^_hbar(s - e_j).
double smoothed_counting_density(std::span<const double> eigs, const SmoothingKernel& kernel,
                                 const FunctionProfile& f, double s);

// |N(E) - (N * chi^_hbar)(E)| for the counting function of eigs. eigs must
// hold every eigenvalue up to E + 50 hbar / T0.
double tauberian_gap(std::span<const double> eigs, const SmoothingKernel& kernel, double E = 0.0);

}  // namespace semiweyl
