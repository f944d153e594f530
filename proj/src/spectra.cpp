#include "semiweyl/spectra.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include "semiweyl/errors.hpp"

namespace semiweyl {

namespace {

// Eigenvalues strictly below x.
int sturm_count_strict(const Tridiagonal& T, double x, double pivmin) {
  const int n = T.size();
  int count = 0;
  double q = T.d[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    q = T.d[i] - x - T.e[i - 1] * T.e[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

double pivot_floor(const Tridiagonal& T) {
  double m = 1.0;
  for (double e : T.e) m = std::max(m, e * e);
  return DBL_MIN * m;
}

}  // namespace

std::pair<double, double> gershgorin_bounds(const Tridiagonal& T) {
  const int n = T.size();
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(T.e[i - 1]);
    if (i + 1 < n) r += std::abs(T.e[i]);
    lo = std::min(lo, T.d[i] - r);
    hi = std::max(hi, T.d[i] + r);
  }
  return {lo, hi};
}

int sturm_count_below(const Tridiagonal& T, double E) {
  if (T.size() == 0) return 0;
  return sturm_count_strict(T, E + kZeroBand, pivot_floor(T));
}

std::vector<double> eigenvalues_below(const Tridiagonal& T, double E, double tol) {
  if (T.size() == 0) return {};
  const double pivmin = pivot_floor(T);
  const double top = E + kZeroBand;
  const int count = sturm_count_strict(T, top, pivmin);
  const double lo0 = gershgorin_bounds(T).first - 1.0;
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) {
    // smallest x with more than k eigenvalues below it
    double lo = k > 0 ? out[k - 1] : lo0, hi = top;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (sturm_count_strict(T, mid, pivmin) > k)
        hi = mid;
      else
        lo = mid;
    }
    out[k] = 0.5 * (lo + hi);
  }
  return out;
}

bool CountingFunction::monotone() const {
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].first < samples[i - 1].first || samples[i].second < samples[i - 1].second) return false;
  return true;
}

CountingFunction counting_function(const Tridiagonal& T, std::span<const double> thresholds, double hbar) {
  CountingFunction N;
  N.hbar = hbar;
  std::vector<double> e(thresholds.begin(), thresholds.end());
  std::sort(e.begin(), e.end());
  for (double E : e) N.samples.emplace_back(E, sturm_count_below(T, E));
  return N;
}

double riesz_mean(std::span<const double> eigs, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("riesz_mean: gamma must lie in (0, 1]");
  std::vector<double> terms;
  for (double e : eigs)
    if (e <= kZeroBand) terms.push_back(e < 0.0 ? std::pow(-e, gamma) : 0.0);
  return pairwise_sum(terms);
}

double riesz_layer_cake(const CountingFunction& N, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("riesz_layer_cake: gamma must lie in (0, 1]");
  const auto& s = N.samples;
  if (s.empty() || s.front().second != 0 || s.back().first < 0.0)
    throw DomainError("riesz_layer_cake: samples must start below the spectrum and reach 0");
  std::vector<double> terms;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double a = std::min(s[i].first, 0.0), b = std::min(s[i + 1].first, 0.0);
    if (a >= b) continue;
    const double n = 0.5 * (s[i].second + s[i + 1].second);
    terms.push_back(n * (std::pow(-a, gamma) - std::pow(-b, gamma)));
  }
  return pairwise_sum(terms);
}

SpectralSample spectral_sample(const Tridiagonal& T, double hbar, std::span<const double> gammas, double tol) {
  SpectralSample s;
  s.hbar = hbar;
  s.eigenvalues_below = eigenvalues_below(T, 0.0, tol);
  s.count = static_cast<int>(s.eigenvalues_below.size());
  s.riesz[0.0] = s.count;
  for (double g : gammas)
    if (g > 0.0) s.riesz[g] = riesz_mean(s.eigenvalues_below, g);
  return s;
}

// ------------------------------------------------------------ smoothing kernel

namespace {

double psi(double t, double T0) {
  const double u = 2.0 * t / T0;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

void gauss_panels(double a, double b, int panels, std::vector<double>& t, std::vector<double>& w) {
  const GaussRule& g = gauss_legendre(16);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < 16; ++i) {
      t.push_back(a + h * (p + 0.5 * (1.0 + g.nodes[i])));
      w.push_back(0.5 * h * g.weights[i]);
    }
}

constexpr int kPanels = 256;

}  // namespace

SmoothingKernel::SmoothingKernel(double hbar, double T0) : hbar_(hbar), T0_(T0) {
  if (!(hbar > 0.0)) throw DomainError("SmoothingKernel: hbar must be positive");
  if (!(T0 > 0.0)) throw DomainError("SmoothingKernel: T0 must be positive");
  gauss_panels(0.0, 0.5 * T0, kPanels / 2, tp_, wp_);
  psi_.resize(tp_.size());
  std::vector<double> sq(tp_.size());
  for (std::size_t i = 0; i < tp_.size(); ++i) {
    psi_[i] = psi(tp_[i], T0);
    sq[i] = 2.0 * wp_[i] * psi_[i] * psi_[i];
  }
  psi_norm2_ = pairwise_sum(sq);
  gauss_panels(0.0, T0, kPanels, tc_, wc_);
  chi_over_t_.resize(tc_.size());
  for (std::size_t i = 0; i < tc_.size(); ++i) chi_over_t_[i] = chi(tc_[i]) / tc_[i];
  // 16-point panels of width T0 / kPanels stay exact up to a phase of about 8 per panel.
  v_max_ = 8.0 * kPanels / T0;
}

double SmoothingKernel::chi(double t) const {
  t = std::abs(t);
  if (t >= T0_) return 0.0;
  const double h = 0.5 * T0_;
  return integrate_gl([&](double s) { return psi(s, T0_) * psi(t - s, T0_); }, t - h, h, kPanels / 2, 16) /
         psi_norm2_;
}

double SmoothingKernel::psi_hat(double w) const {
  std::vector<double> terms(tp_.size());
  for (std::size_t i = 0; i < tp_.size(); ++i) terms[i] = 2.0 * wp_[i] * psi_[i] * std::cos(w * tp_[i]);
  return pairwise_sum(terms);
}

double SmoothingKernel::chi_hat_unit(double v) const {
  if (std::abs(v) > v_max_) return 0.0;
  const double p = psi_hat(v);
  return p * p / (2.0 * std::numbers::pi * psi_norm2_);
}

double SmoothingKernel::cumulative_unit(double u) const {
  if (u > v_max_) return 1.0;
  if (u < -v_max_) return 0.0;
  std::vector<double> terms(tc_.size());
  for (std::size_t i = 0; i < tc_.size(); ++i) terms[i] = wc_[i] * chi_over_t_[i] * std::sin(u * tc_[i]);
  return 0.5 + pairwise_sum(terms) / std::numbers::pi;
}

double smoothed_counting_density(std::span<const double> eigs, const SmoothingKernel& kernel,
                                 const FunctionProfile& f, double s) {
  std::vector<double> terms;
  for (double e : eigs) {
    const double fe = f.eval(e);
    if (fe != 0.0) terms.push_back(fe * kernel.chi_hat(s - e));
  }
  return pairwise_sum(terms);
}

double tauberian_gap(std::span<const double> eigs, const SmoothingKernel& kernel, double E) {
  std::vector<double> terms;
  for (double e : eigs) {
    const double sharp = e <= E + kZeroBand ? 1.0 : 0.0;
    terms.push_back(sharp - kernel.cumulative_unit((E - e) / kernel.hbar()));
  }
  return std::abs(pairwise_sum(terms));
}

}  // namespace semiweyl
