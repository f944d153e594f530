#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "semiweyl/function_profile.hpp"
#include "semiweyl/quantize.hpp"
#include "semiweyl/symcalc.hpp"

namespace semiweyl {

inline constexpr int kMaxResolventOrder = 3;

// Symbols b_{z,j} of (Op_W(a) - z)^{-1} written as sum_k d_{j,k} B^{k+1},
// B = (a_0 - z)^{-1}.
struct ResolventSymbolSeries {
  SymbolSeries base;
  int order = 0;
  std::vector<SymbolExpr> b;                 // b_0 .. b_J
  std::map<std::pair<int, int>, SymbolExpr> d;  // (j, k) -> d_{j,k}, nonzero entries only

  const SymbolExpr& coefficient(int j, int k) const;
  // Largest k with d_{j,k} != 0.
  int max_power(int j) const;
};

// Throws DomainError naming an atom that needs more derivatives than a
// coefficient field provides.
ResolventSymbolSeries resolvent_symbols(const SymbolSeries& base, int order);

// a^f_j = sum_k ((-1)^k / k!) d_{j,k} f^{(k)}(a_0) as expressions with outer
// atoms f^{(k)}; entry 0 is f(a_0).
std::vector<SymbolExpr> funcalc_symbols(const ResolventSymbolSeries& series, int order);

// f~(x + iy) = sum_{r <= n} f^{(r)}(x) (iy)^r / r! * w(y / lambda) with a
// plateau cutoff w equal to 1 on [-1, 1] and 0 outside (-2, 2).
class AlmostAnalyticExtension {
 public:
  AlmostAnalyticExtension(ProfilePtr f, int n, double lambda = 1.0);

  cplx value(double x, double y) const;
  // (d_x + i d_y) f~ / 2.
  cplx dbar(double x, double y) const;
  int terms() const { return n_; }
  double lambda() const { return lambda_; }
  const FunctionProfile& profile() const { return *f_; }

 private:
  ProfilePtr f_;
  int n_;
  double lambda_;
};

AlmostAnalyticExtension almost_analytic_extend(ProfilePtr f, int n, double lambda = 1.0);

struct HsQuadrature {
  int qx = 8;
  int qy = 6;
  // Orders of the comparison rule.
  int qx_check = 12;
  int qy_check = 8;
  // Upper bound on the x panel width; panels are also kept below lambda / 10.
  double panel_width = 0.05;
  // Subintervals of [lambda, 2 lambda], where the cutoff varies.
  int cutoff_panels = 16;
  // Extension width; 0 picks the largest lambda with
  // sup|f^{(r)}| lambda^r / r! <= 4 sup|f| for r <= n + 1.
  double lambda = 0.0;
  double tol = 1e-6;
  // Innermost band floor relative to lambda.
  double y_floor = 1e-6;
  int threads = 1;
};

struct HsReport {
  double error_estimate = 0.0;
  double tail_bound = 0.0;
  int bands = 0;
  std::size_t nodes = 0;
};

// f(H) = -(1/pi) int dbar f~(z) (z - H)^{-1} dL(z) for Hermitian H and f
// with compact support. Throws ConvergenceError when the two quadrature
// orders disagree by more than quad.tol.
Eigen::MatrixXcd hs_apply(const Eigen::MatrixXcd& H, ProfilePtr f, int n, const HsQuadrature& quad = {},
                          HsReport* report = nullptr);
OperatorMatrix hs_apply(const OperatorMatrix& H, ProfilePtr f, int n, const HsQuadrature& quad = {},
                        HsReport* report = nullptr);

// f(H) by eigendecomposition.
Eigen::MatrixXcd eig_apply(const Eigen::MatrixXcd& H, const FunctionProfile& f);

// Phase-space quadrature box for one-dimensional symbols.
struct PhaseQuadrature {
  double x_lo = -3.141592653589793;
  double x_hi = 3.141592653589793;
  int x_panels = 64;
  int p_panels = 64;
  int q = 12;
  int threads = 1;
};

// T_j = int a^f_j dx dp for j = 0..order. The p-range is found from the
// support of f; throws DomainError if f(a_0) does not vanish at its edge.
std::vector<double> trace_expansion_terms(const ResolventSymbolSeries& series, ProfilePtr f, int order,
                                          const PhaseQuadrature& quad = {});

// Op_W of sum_j hbar^j a^f_j on the torus for j <= order.
OperatorMatrix quantize_funcalc(const ResolventSymbolSeries& series, ProfilePtr f, int order, const PhaseGrid& grid,
                                const QuantizeOptions& opt = {});

}  // namespace semiweyl
