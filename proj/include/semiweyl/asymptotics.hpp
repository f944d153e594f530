#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semiweyl/symbol.hpp"

namespace semiweyl {

// Box [x_lo, x_hi] x [p_lo, p_hi] outside of which a_0 > E.
struct PhaseSpaceRegion {
  PolySymbol a0;
  double E = 0.0;
  double x_lo = 0.0, x_hi = 0.0;
  double p_lo = 0.0, p_hi = 0.0;
  int depth = 12;
};

struct RegionOptions {
  // Fixed x-range (periodic symbols); only the p sides are certified.
  std::optional<std::pair<double, double>> x_range;
  double initial = 1.0;
  int boundary_samples = 2048;
};

// Grows a box until a_0 > E on its sampled boundary. Throws DomainError if no
// box up to 2^20 wide certifies.
PhaseSpaceRegion certify_region(const PolySymbol& a0, double E, const RegionOptions& opt = {});

struct VolumeResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t leaves = 0;
  int depth = 0;
};

struct VolumeOptions {
  double abs_tol = 1e-7;
  int min_depth = 4;
  int max_depth = 16;
  RegionOptions region;
};

// |{(x, p) : a_0(x, p) <= E}| for d = 1 by dyadic subdivision. Mixed boxes at
// the depth cap use a least-squares linear model of a_0; the error estimate
// sums the change between a box's model and its children's.
VolumeResult weyl_volume(const PolySymbol& a0, double E, const VolumeOptions& opt = {});

// Fiber quadrature for a_0 = c_2(x) p^2 + c_1(x) p + c_0(x) with c_2 > 0:
// each x-fiber of {a_0 <= s} is an interval in closed form.
class FiberIntegrator {
 public:
  struct Options {
    double x_lo = -8.0;
    double x_hi = 8.0;
    // Scan resolution for turning points.
    int scan = 4096;
    int panels = 16;
    int q = 24;
  };

  explicit FiberIntegrator(const PolySymbol& a0, Options opt);
  FiberIntegrator(const PolySymbol& a0) : FiberIntegrator(a0, Options{}) {}

  // int 1_{a_0 <= s} w dx dp for w polynomial in p.
  double weighted_volume(const PolySymbol& w, double s) const;
  double volume(double s) const;
  // int w (s - a_0)_+^beta dx dp for beta > -1.
  double power_moment(const PolySymbol& w, double s, double beta) const;
  // Points where the well bottom m(x) = min_p a_0 crosses s, with |m'(x)| there.
  std::vector<std::pair<double, double>> turning_points(double s) const;
  double minimum() const;

 private:
  double bottom(double x) const;
  template <class Fiber>
  double integrate_wells(double s, Fiber&& fiber) const;

  PolySymbol a0_;
  Options opt_;
  std::vector<double> grid_, bottom_grid_;
};

struct RieszTerms {
  double psi0 = 0.0;
  double psi1 = 0.0;
  double psi0_error = 0.0;
  double psi1_error = 0.0;
};

struct RieszOptions {
  FiberIntegrator::Options fiber;
  // Smallest |grad a_0| allowed on the level set a_0 = 0.
  double gradient_floor = 1e-3;
};

// Psi_0 = int (a_0)_-^gamma, Psi_1 = -gamma int a_1 (a_0)_-^{gamma - 1}, the first-order
// change of int (a_0 + hbar a_1)_-^gamma.
RieszTerms riesz_phase_terms(const PolySymbol& a0, const PolySymbol& a1, double gamma,
                             const RieszOptions& opt = {});

// Psi_0 by the layer cake int_0^U V(-u^{1/gamma}) du with subdivision volumes.
double riesz_psi0_layer_cake(const PolySymbol& a0, double gamma, int nodes = 48, const VolumeOptions& opt = {});

struct CoareaOptions {
  FiberIntegrator::Options fiber;
  double step = 1e-2;
  // Allowed disagreement between the h and h/2 differences after Richardson.
  double tol = 1e-6;
};

// int_{a_0 = s} w / |grad a_0| dS as d/ds of int_{a_0 <= s} w.
double coarea_density(const PolySymbol& a0, const PolySymbol& w, double s, const CoareaOptions& opt = {});

// ----------------------------------------------------------- stationary phase

struct ExpansionResult {
  // terms[j] multiplies hbar^j; value() is their sum.
  std::vector<std::pair<int, cplx>> terms;
  double hbar = 0.0;
  double remainder_estimate = 0.0;
  std::string method;

  cplx value() const;
};

struct Amplitude {
  // d^alpha a at v = 0.
  std::function<double(const MultiIndex&)> derivative_at_zero;
  // Pointwise values for the direct quadrature (n = 1).
  std::function<double(double)> value;
  // a is negligible outside [-radius, radius].
  double radius = 10.0;
};

// Terms of int exp(i <B v, v> / (2 hbar)) a(v) dv up to order N. For n = 1 the
// remainder is measured against direct quadrature; otherwise it is the size of
// the last term.
ExpansionResult stationary_phase_expand(const Eigen::MatrixXd& B, const Amplitude& a, double hbar, int N);

// Direct Gauss quadrature of the one-dimensional integral.
cplx oscillatory_integral_1d(double B, const std::function<double(double)>& a, double hbar, double lo, double hi);

}  // namespace semiweyl
