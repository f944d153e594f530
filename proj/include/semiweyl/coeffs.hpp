#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semiweyl/field.hpp"
#include "semiweyl/symbol.hpp"

namespace semiweyl {

enum class FieldFamily { weierstrass, abs_power, smooth };

// Parameters for make_test_field. All families are one-dimensional and have
// the shape offset + scale * core(x) + polynomial(x) + trig(x).
struct FieldParams {
  int k = 0;
  double mu = 0.5;
  double offset = 0.0;
  double scale = 1.0;
  // Smooth additive part: sum_n poly[n] x^n + sum_n cos[n] cos(n w x) + sin[n] sin(n w x).
  std::vector<double> poly;
  std::vector<double> cos_terms;
  std::vector<double> sin_terms;
  double omega = 1.0;
  // abs_power core |u(x)|^{k+mu} with u = x - center or u = sin(x - center).
  double center = 0.0;
  bool sine_inner = false;
  // weierstrass core sum_{n=1}^{terms} base^{-n(k+mu)} cos(base^n x).
  double base = 2.0;
  int terms = 24;
  // Window used to estimate constants by sampling.
  double window = 6.0;
};

HoelderPtr make_test_field(FieldFamily family, const FieldParams& params);

// Sampled estimates used to certify declared constants.
double estimate_hoelder_seminorm(const CoefficientField& f, double lo, double hi, int samples);
GrowthBound estimate_growth_bound(const CoefficientField& f, double n0, double lo, double hi, int samples);

// Schwartz kernel whose Fourier transform is a smooth plateau bump equal to 1
// on [-plateau, plateau] and 0 outside (-cutoff, cutoff). All moments of
// positive order vanish.
class MollifierKernel {
 public:
  struct Params {
    double plateau = 1.0;
    double cutoff = 3.0;
    int moment_order = 10;
    int derivative_order = 6;
    // Node map y = stretch * sinh(s / stretch) on a uniform s grid.
    double stretch = 16.0;
    double step = 0.02;
    double radius = 240.0;
  };

  explicit MollifierKernel(Params params);
  static std::shared_ptr<const MollifierKernel> standard();

  const Params& params() const { return params_; }
  int moment_order() const { return params_.moment_order; }
  int derivative_order() const { return params_.derivative_order; }

  double fourier_profile(double xi) const;
  double profile(double y) const { return profile_derivative(0, y); }
  double profile_derivative(int r, double y) const;

  // Tabulated quadrature rule: sum_j weights(r)[j] g(nodes[j]) approximates
  // the integral of g * profile^{(r)}. The rule is corrected so that
  // polynomial moments up to moment_order are reproduced.
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights(int r) const { return weights_.at(r); }
  // Coarse rule of the same kind, used for tensor products in d = 2.
  std::span<const double> coarse_nodes() const { return coarse_nodes_; }
  std::span<const double> coarse_weights(int r) const { return coarse_weights_.at(r); }

  // Integral of y^j profile(y) computed with the tabulated rule.
  double moment(int j) const;
  // Crude bound for the integral of (1 + eps |y|)^n |profile(y)| over |y| > radius.
  double tail_mass(double n, double eps) const;

 private:
  void tabulate(double stretch, double step, double radius, std::vector<double>& nodes,
                std::vector<std::vector<double>>& weights) const;
  void correct_moments(int r, const std::vector<double>& nodes, const std::vector<double>& base,
                       std::vector<double>& w) const;

  Params params_;
  std::vector<double> xi_nodes_, xi_weights_;
  std::vector<double> nodes_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> coarse_nodes_;
  std::vector<std::vector<double>> coarse_weights_;
};

using KernelPtr = std::shared_ptr<const MollifierKernel>;

// f_eps = f * eps^{-d} profile(./eps). Smooth to all orders.
class MollifiedField : public CoefficientField {
 public:
  enum class Backend { automatic, quadrature, fourier };

  MollifiedField(FieldPtr base, KernelPtr kernel, double eps, Backend backend = Backend::automatic);

  double deriv(const MultiIndex& eta, Point x) const override;
  int max_order() const override { return kUnlimitedOrder; }
  int k() const override { return base_->k(); }
  double mu() const override { return base_->mu(); }
  double eps() const override { return eps_; }
  std::optional<double> period() const override { return base_->period(); }
  bool periodic_with(double p) const override { return base_->periodic_with(p); }
  std::string describe() const override;

  const FieldPtr& base() const { return base_; }
  Backend backend() const { return backend_; }
  // Fourier modes kept by the periodic backend.
  int fourier_modes() const { return static_cast<int>(modes_.size() / 2); }

 private:
  double quadrature_deriv(const MultiIndex& eta, Point x) const;
  double fourier_deriv(int r, double x) const;

  FieldPtr base_;
  KernelPtr kernel_;
  double eps_;
  Backend backend_;
  double kappa0_ = 1.0;
  std::vector<cplx> modes_;  // c_m for m = -K..K stored at index m + K
  double tail_bound_ = 0.0;
  double tail_zeta_ = 0.0;
};

std::shared_ptr<const MollifiedField> mollify(FieldPtr f, KernelPtr kernel, double eps);

// Sampled CSV (x, f, f_eps, abs_err) for a one-dimensional mollified field.
std::string mollified_csv(const MollifiedField& f, double lo, double hi, int samples);

// One coefficient of a sesquilinear form sum <a_{ab} (hD)^b u, (hD)^a u>:
// coefficient value is factor * field(x).
struct FormTerm {
  MultiIndex alpha;
  MultiIndex beta;
  FieldPtr field;
  cplx factor{1.0, 0.0};
};

using Form = std::vector<FormTerm>;

// Throws DomainError unless a_{ab} = conj(a_{ba}) term by term.
void check_form_symmetry(const Form& form);
int form_order(const Form& form);
// Principal symbol sum a_{ab}(x) p^{a+b}.
PolySymbol principal_symbol(const Form& form);


// Mollifies every coefficient of finite smoothness; fields smooth to all
// orders are kept. Conjugate partners keep sharing one field.
Form mollify_form(const Form& form, double eps, KernelPtr kernel);

struct FramingOptions {
  // Window on which sup |a - a_eps| is sampled.
  double window_lo = -4.0;
  double window_hi = 4.0;
  int samples = 8001;
  // C_1 = c_scale * (number of coefficient pairs) * max_pairs K * safety.
  double c_scale = 1.0;
  double safety = 1.05;
  // Lower bound for the top-order part divided by |p|^{2m}; estimated on the
  // window when absent.
  std::optional<double> ellipticity;
};

// Symbols a^+ and a^- that bound the form symbol from above and below, with
// the forms that produce them.
struct FramingSymbolPair {
  PolySymbol plus;
  PolySymbol minus;
  double eps = 1.0;
  double c1 = 0.0;
  double tau = 0.0;
  double shift = 0.0;  // c1 * eps^tau
  int order = 0;       // m
  Form mollified;
  Form plus_form;
  Form minus_form;
  // sup |a - a_eps| / eps^tau per form term.
  std::vector<double> mollification_constants;
  double ellipticity = 0.0;
  double threshold_eps = 1.0;
};

FramingSymbolPair build_framing_symbols(const Form& form, double eps, KernelPtr kernel,
                                        const FramingOptions& options = {});

// sum_{|a| <= m} p^{2a}.
PolySymbol framing_weight(int dim, int m);

}  // namespace semiweyl
