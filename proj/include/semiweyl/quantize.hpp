#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "semiweyl/coeffs.hpp"
#include "semiweyl/symbol.hpp"

namespace semiweyl {

// Discrete torus x in [-L, L) with n momentum modes p_q = (pi hbar / L) q,
// q in [-n/2, n/2).
struct PhaseGrid {
  int n = 256;
  double L = 3.141592653589793;
  double hbar = 0.1;

  // Throws DomainError unless n is a power of two and L, hbar are positive.
  void validate() const;
  double dp() const { return 3.141592653589793 * hbar / L; }
  int mode(int idx) const { return idx - n / 2; }
  double momentum(int idx) const { return dp() * mode(idx); }
  double p_max() const { return dp() * (n / 2); }
  double hx() const { return 2.0 * L / n; }
  double x(int j) const { return -L + hx() * j; }
};

struct QuantizeOptions {
  // Largest |p| the classical dynamics reaches; 0 disables the Nyquist check.
  double classical_p_max = 0.0;
  bool strict = false;
  // Relative agreement required between Fourier coefficients computed with
  // M and 2M samples.
  double aliasing_tol = 1e-11;
  int max_samples = 1 << 16;
  int threads = 1;
};

// Operator on the span of e^{i p_q x / hbar}, stored in the momentum basis.
struct OperatorMatrix {
  PhaseGrid grid;
  Eigen::MatrixXcd m;
  double hermitian_residual = 0.0;
  // Largest relative change of any Fourier coefficient at the final
  // sampling refinement.
  double aliasing_estimate = 0.0;
  bool nyquist_ok = true;
};

double hermitian_residual(const Eigen::MatrixXcd& m);

// Op_t(a) for t in {0, 1/2, 1}: <q|Op_t(c p^k)|q'> = c^(q - q') ((1 - t) p_q' + t p_q)^k.
OperatorMatrix t_quantize_on_torus(const PolySymbol& a, double t, const PhaseGrid& grid,
                                   const QuantizeOptions& opt = {});
OperatorMatrix weyl_quantize_on_torus(const PolySymbol& a, const PhaseGrid& grid, const QuantizeOptions& opt = {});
// sum_j hbar^j Op_W(a_j).
OperatorMatrix weyl_quantize_series(const SymbolSeries& a, const PhaseGrid& grid, const QuantizeOptions& opt = {});

// Symbol given pointwise: fills out[i] = a(x, p[i]).
using SymbolRowFn = std::function<void(double x, std::span<const double> p, std::span<cplx> out)>;
OperatorMatrix weyl_quantize_function(const SymbolRowFn& a, const PhaseGrid& grid, const QuantizeOptions& opt = {});

// sum (hD)^a a_{ab} (hD)^b on the torus, built from multiplication and
// momentum matrices without symbol calculus.
OperatorMatrix form_on_torus(const Form& form, const PhaseGrid& grid, const QuantizeOptions& opt = {});

// Trace of Op_W(a) on the torus.
cplx trace_of_quantization(const PolySymbol& a, const PhaseGrid& grid, const QuantizeOptions& opt = {});

// Rows and columns with |p_q| <= frac * p_max.
Eigen::MatrixXcd low_block(const Eigen::MatrixXcd& m, const PhaseGrid& grid, double frac = 0.5);
double spectral_norm(const Eigen::MatrixXcd& m);
// Momentum-basis matrix to position-basis values at the grid points x_j.
Eigen::MatrixXcd to_position_basis(const Eigen::MatrixXcd& m);

double min_eigenvalue(const OperatorMatrix& op);

struct GardingReport {
  std::vector<double> hbar;
  std::vector<double> min_eig;
  double sampled_symbol_min = 0.0;
  // Fit of max(-min_eig, 0) against hbar; absent when every negative part
  // is zero.
  std::optional<SlopeFit> fit;
  bool nonnegative_everywhere = false;
  double worst_bound_ratio = 0.0;  // max over the sweep of (-min_eig)_+ / hbar^delta
};

// Min eigenvalues of Op_W(a) over the grids. a must be real and
// nonnegative on samples.
GardingReport garding_check(const PolySymbol& a, std::span<const PhaseGrid> grids, double delta,
                            const QuantizeOptions& opt = {});

// Binary layout: int64 n, float64 hbar, float64 L, then n*n complex entries
// as (re, im) float64 pairs, row-major, little-endian.
void write_matrix_binary(const OperatorMatrix& op, std::ostream& os);
OperatorMatrix read_matrix_binary(std::istream& is);
void write_matrix_text(const OperatorMatrix& op, std::ostream& os);

// ------------------------------------------------------------ form operators

// Interior nodes x_j = lo + j h, j = 1..n, h = (hi - lo) / (n + 1); u vanishes at lo and hi.
struct IntervalGrid {
  double lo = 0.0;
  double hi = 1.0;
  int n = 100;

  double h() const { return (hi - lo) / (n + 1); }
  double x(int j) const { return lo + (j + 1) * h(); }
};

// Symmetric real tridiagonal matrix: diagonal d, off-diagonal e (size n - 1).
struct Tridiagonal {
  std::vector<double> d;
  std::vector<double> e;
  int size() const { return static_cast<int>(d.size()); }
  Eigen::MatrixXd dense() const;
};

struct FormOperator1D {
  IntervalGrid grid;
  double hbar = 1.0;
  std::vector<cplx> diag;
  std::vector<cplx> off;  // entry (j, j + 1)
  double symmetry_residual = 0.0;

  // Unitarily equivalent real symmetric tridiagonal matrix.
  Tridiagonal real_form() const;
  Eigen::MatrixXcd dense() const;
};

// Flux discretization of sum (hD)^a a_{ab} (hD)^b with m = 1 in d = 1.
FormOperator1D assemble_form_operator(const Form& form, const IntervalGrid& grid, double hbar);

}  // namespace semiweyl
