#include "semiweyl/quantize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <unsupported/Eigen/FFT>

namespace semiweyl {

void PhaseGrid::validate() const {
  if (n < 2 || (n & (n - 1)) != 0) throw DomainError("PhaseGrid: n must be a power of two >= 2");
  if (!(L > 0.0)) throw DomainError("PhaseGrid: L must be positive");
  if (!(hbar > 0.0)) throw DomainError("PhaseGrid: hbar must be positive");
}

double hermitian_residual(const Eigen::MatrixXcd& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

namespace {

using Sampler = std::function<void(std::span<const double> xs, std::span<cplx> out)>;

// c^(k) = (1/2L) int c(x) e^{-i pi k x / L} dx for |k| <= kmax, stored at
// index k + kmax, with the sample count doubled until two refinements agree.
std::vector<cplx> fourier_coefficients(const Sampler& sample, double L, int kmax, const QuantizeOptions& opt,
                                       double& alias, int* used = nullptr) {
  int m = 64;
  while (m < 4 * (kmax + 1)) m *= 2;
  std::vector<double> xs;
  std::vector<cplx> vals;
  auto fill = [&](int count) {
    std::vector<double> nx(count);
    for (int j = 0; j < count; ++j) nx[j] = -L + 2.0 * L * j / count;
    std::vector<cplx> nv(count);
    if (vals.empty()) {
      parallel_for(static_cast<std::size_t>((count + 255) / 256), opt.threads, [&](std::size_t b) {
        const int lo = static_cast<int>(b) * 256, hi = std::min(count, lo + 256);
        sample(std::span<const double>(nx).subspan(lo, hi - lo), std::span<cplx>(nv).subspan(lo, hi - lo));
      });
    } else {
      // Reuse the previous samples at even indices.
      const int half = count / 2;
      std::vector<double> odd_x(half);
      std::vector<cplx> odd_v(half);
      for (int j = 0; j < half; ++j) odd_x[j] = nx[2 * j + 1];
      parallel_for(static_cast<std::size_t>((half + 255) / 256), opt.threads, [&](std::size_t b) {
        const int lo = static_cast<int>(b) * 256, hi = std::min(half, lo + 256);
        sample(std::span<const double>(odd_x).subspan(lo, hi - lo), std::span<cplx>(odd_v).subspan(lo, hi - lo));
      });
      for (int j = 0; j < half; ++j) {
        nv[2 * j] = vals[j];
        nv[2 * j + 1] = odd_v[j];
      }
    }
    xs = std::move(nx);
    vals = std::move(nv);
  };
  auto transform = [&]() {
    const int count = static_cast<int>(vals.size());
    Eigen::FFT<double> fft;
    std::vector<cplx> spec;
    fft.fwd(spec, vals);
    std::vector<cplx> c(2 * kmax + 1);
    for (int k = -kmax; k <= kmax; ++k) {
      const int idx = k >= 0 ? k : count + k;
      // x_0 = -L contributes the phase e^{i pi k}.
      c[k + kmax] = spec[idx] / static_cast<double>(count) * ((k & 1) ? -1.0 : 1.0);
    }
    return c;
  };
  fill(m);
  std::vector<cplx> prev = transform();
  while (true) {
    if (2 * m > opt.max_samples) {
      alias = std::numeric_limits<double>::infinity();
      if (opt.strict) throw ConvergenceError("quantize: Fourier coefficients did not converge", alias);
      if (used) *used = m;
      return prev;
    }
    m *= 2;
    fill(m);
    std::vector<cplx> cur = transform();
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      scale = std::max(scale, std::abs(cur[i]));
      diff = std::max(diff, std::abs(cur[i] - prev[i]));
    }
    alias = scale > 0.0 ? diff / scale : 0.0;
    if (alias <= opt.aliasing_tol) {
      if (used) *used = m;
      return cur;
    }
    prev = std::move(cur);
  }
}

void check_nyquist(OperatorMatrix& op, const QuantizeOptions& opt) {
  if (opt.classical_p_max <= 0.0) return;
  op.nyquist_ok = op.grid.p_max() >= 2.0 * opt.classical_p_max;
  if (!op.nyquist_ok && opt.strict)
    throw DomainError("quantize: grid momentum range " + std::to_string(op.grid.p_max()) +
                      " is below twice the classical range " + std::to_string(opt.classical_p_max));
}

}  // namespace

OperatorMatrix t_quantize_on_torus(const PolySymbol& a, double t, const PhaseGrid& grid, const QuantizeOptions& opt) {
  grid.validate();
  if (t != 0.0 && t != 0.5 && t != 1.0) throw DomainError("quantize: t must be 0, 1/2 or 1");
  if (a.dim() != 1) throw DomainError("quantize: torus quantization is one-dimensional");
  const int n = grid.n, kmax = n - 1;
  OperatorMatrix op;
  op.grid = grid;
  op.m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [alpha, c] : a.terms()) {
    std::vector<cplx> chat(2 * kmax + 1, cplx(0.0));
    if (c.is_constant()) {
      chat[kmax] = c.constant_term();
    } else {
      if (!coeff_periodic_with(c, 2.0 * grid.L) && opt.strict)
        throw DomainError("quantize: coefficient is not periodic on the torus");
      double alias = 0.0;
      chat = fourier_coefficients(
          [&](std::span<const double> xs, std::span<cplx> out) {
            for (std::size_t i = 0; i < xs.size(); ++i) out[i] = eval_coeff(c, Point(&xs[i], 1));
          },
          grid.L, kmax, opt, alias);
      op.aliasing_estimate = std::max(op.aliasing_estimate, alias);
    }
    const int k = alpha[0];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const cplx ch = chat[(i - j) + kmax];
        if (ch == cplx(0.0)) continue;
        const double P = (1.0 - t) * grid.momentum(j) + t * grid.momentum(i);
        op.m(i, j) += ch * std::pow(P, k);
      }
    }
  }
  op.hermitian_residual = hermitian_residual(op.m);
  check_nyquist(op, opt);
  return op;
}

OperatorMatrix weyl_quantize_on_torus(const PolySymbol& a, const PhaseGrid& grid, const QuantizeOptions& opt) {
  return t_quantize_on_torus(a, 0.5, grid, opt);
}

OperatorMatrix weyl_quantize_series(const SymbolSeries& a, const PhaseGrid& grid, const QuantizeOptions& opt) {
  if (a.empty()) throw DomainError("weyl_quantize_series: empty series");
  OperatorMatrix op = weyl_quantize_on_torus(a[0], grid, opt);
  double hp = 1.0;
  for (std::size_t j = 1; j < a.size(); ++j) {
    hp *= grid.hbar;
    if (a[j].is_zero()) continue;
    const OperatorMatrix t = weyl_quantize_on_torus(a[j], grid, opt);
    op.m += hp * t.m;
    op.aliasing_estimate = std::max(op.aliasing_estimate, t.aliasing_estimate);
  }
  op.hermitian_residual = hermitian_residual(op.m);
  return op;
}

OperatorMatrix weyl_quantize_function(const SymbolRowFn& a, const PhaseGrid& grid, const QuantizeOptions& opt) {
  grid.validate();
  const int n = grid.n, kmax = n - 1;
  // Midpoint momenta P_s = dp * s / 2 for s = q + q' in [-n, n - 2].
  const int ns = 2 * n - 1;
  std::vector<double> P(ns);
  for (int s = 0; s < ns; ++s) P[s] = grid.dp() * 0.5 * (s - n);

  // Sample count from a few representative momenta.
  int m = 64;
  double worst = 0.0;
  for (int s : {0, ns / 4, ns / 2, 3 * ns / 4, ns - 1}) {
    const double ps = P[s];
    double alias = 0.0;
    int used = 0;
    fourier_coefficients(
        [&](std::span<const double> xs, std::span<cplx> out) {
          for (std::size_t i = 0; i < xs.size(); ++i) a(xs[i], std::span<const double>(&ps, 1), out.subspan(i, 1));
        },
        grid.L, kmax, opt, alias, &used);
    m = std::max(m, used);
    worst = std::max(worst, alias);
  }

  OperatorMatrix op;
  op.grid = grid;
  op.m = Eigen::MatrixXcd::Zero(n, n);
  std::vector<double> xs(m);
  for (int j = 0; j < m; ++j) xs[j] = -grid.L + 2.0 * grid.L * j / m;
  const int block = 128;
  for (int s0 = 0; s0 < ns; s0 += block) {
    const int s1 = std::min(ns, s0 + block), bw = s1 - s0;
    std::vector<cplx> samples(static_cast<std::size_t>(m) * bw);
    const std::span<const double> pb(P.data() + s0, bw);
    parallel_for(static_cast<std::size_t>(m), opt.threads, [&](std::size_t j) {
      a(xs[j], pb, std::span<cplx>(samples.data() + j * bw, bw));
    });
    std::vector<cplx> col(m), spec;
    Eigen::FFT<double> fft;
    for (int c = 0; c < bw; ++c) {
      for (int j = 0; j < m; ++j) col[j] = samples[static_cast<std::size_t>(j) * bw + c];
      fft.fwd(spec, col);
      const int s = s0 + c - n;  // q + q' as signed modes
      for (int i = 0; i < n; ++i) {
        const int q = grid.mode(i), qq = s - q;
        if (qq < -n / 2 || qq >= n / 2) continue;
        const int k = q - qq;
        op.m(i, qq + n / 2) = spec[k >= 0 ? k : m + k] / static_cast<double>(m) * ((k & 1) ? -1.0 : 1.0);
      }
    }
  }
  op.aliasing_estimate = worst;
  op.hermitian_residual = hermitian_residual(op.m);
  check_nyquist(op, opt);
  return op;
}

OperatorMatrix form_on_torus(const Form& form, const PhaseGrid& grid, const QuantizeOptions& opt) {
  if (form.empty()) throw DomainError("form_on_torus: empty form");
  check_form_symmetry(form);
  grid.validate();
  Eigen::VectorXd p(grid.n);
  for (int i = 0; i < grid.n; ++i) p[i] = grid.momentum(i);
  OperatorMatrix op;
  op.grid = grid;
  op.m = Eigen::MatrixXcd::Zero(grid.n, grid.n);
  for (const FormTerm& t : form) {
    if (t.alpha.dim() != 1) throw DomainError("form_on_torus: one-dimensional forms only");
    const OperatorMatrix c = t_quantize_on_torus(field_symbol(t.field, MultiIndex{0}, t.factor), 0.0, grid, opt);
    const Eigen::VectorXd left = p.array().pow(t.alpha[0]), right = p.array().pow(t.beta[0]);
    op.m += left.asDiagonal() * c.m * right.asDiagonal();
    op.aliasing_estimate = std::max(op.aliasing_estimate, c.aliasing_estimate);
    op.nyquist_ok = op.nyquist_ok && c.nyquist_ok;
  }
  op.hermitian_residual = hermitian_residual(op.m);
  return op;
}

cplx trace_of_quantization(const PolySymbol& a, const PhaseGrid& grid, const QuantizeOptions& opt) {
  return weyl_quantize_on_torus(a, grid, opt).m.trace();
}

Eigen::MatrixXcd low_block(const Eigen::MatrixXcd& m, const PhaseGrid& grid, double frac) {
  std::vector<int> keep;
  for (int i = 0; i < grid.n; ++i)
    if (std::abs(grid.momentum(i)) <= frac * grid.p_max()) keep.push_back(i);
  Eigen::MatrixXcd r(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) r(i, j) = m(keep[i], keep[j]);
  return r;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::MatrixXcd g = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Eigen::MatrixXcd to_position_basis(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  // x_j = -L + 2L j / n and p_q x_j / hbar = pi q (-1 + 2 j / n).
  Eigen::MatrixXcd u(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int q = i - n / 2;
      u(j, i) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), std::numbers::pi * q * (-1.0 + 2.0 * j / n));
    }
  return u * m * u.adjoint();
}

double min_eigenvalue(const OperatorMatrix& op) {
  const Eigen::MatrixXcd h = 0.5 * (op.m + op.m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

GardingReport garding_check(const PolySymbol& a, std::span<const PhaseGrid> grids, double delta,
                            const QuantizeOptions& opt) {
  if (grids.empty()) throw DomainError("garding_check: no grids");
  GardingReport rep;
  double smin = std::numeric_limits<double>::infinity();
  const PhaseGrid& g0 = grids.front();
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j <= 200; ++j) {
      const double x = -g0.L + 2.0 * g0.L * i / 200.0;
      const double p = -g0.p_max() + 2.0 * g0.p_max() * j / 200.0;
      const cplx v = a.eval(x, p);
      if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v))) throw DomainError("garding_check: symbol is not real");
      smin = std::min(smin, v.real());
    }
  rep.sampled_symbol_min = smin;
  if (smin < -1e-12) throw DomainError("garding_check: symbol is negative on samples");
  std::vector<double> hs, neg;
  for (const PhaseGrid& g : grids) {
    const double e = min_eigenvalue(weyl_quantize_on_torus(a, g, opt));
    rep.hbar.push_back(g.hbar);
    rep.min_eig.push_back(e);
    const double np = std::max(-e, 0.0);
    rep.worst_bound_ratio = std::max(rep.worst_bound_ratio, np / std::pow(g.hbar, delta));
    if (np > 0.0) {
      hs.push_back(g.hbar);
      neg.push_back(np);
    }
  }
  rep.nonnegative_everywhere = neg.empty();
  if (neg.size() >= 2 && neg.size() == grids.size()) rep.fit = fit_loglog(hs, neg);
  return rep;
}

void write_matrix_binary(const OperatorMatrix& op, std::ostream& os) {
  static_assert(std::endian::native == std::endian::little, "binary matrix layout assumes a little-endian host");
  const std::int64_t n = op.grid.n;
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&op.grid.hbar), sizeof(double));
  os.write(reinterpret_cast<const char*>(&op.grid.L), sizeof(double));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = op.m(i, j).real(), im = op.m(i, j).imag();
      os.write(reinterpret_cast<const char*>(&re), sizeof re);
      os.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

OperatorMatrix read_matrix_binary(std::istream& is) {
  OperatorMatrix op;
  std::int64_t n = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&op.grid.hbar), sizeof(double));
  is.read(reinterpret_cast<char*>(&op.grid.L), sizeof(double));
  if (!is || n <= 0 || n > (1 << 16)) throw ParseError("matrix: bad header");
  op.grid.n = static_cast<int>(n);
  op.m.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re = 0.0, im = 0.0;
      is.read(reinterpret_cast<char*>(&re), sizeof re);
      is.read(reinterpret_cast<char*>(&im), sizeof im);
      op.m(i, j) = cplx(re, im);
    }
  if (!is) throw ParseError("matrix: truncated data");
  op.hermitian_residual = hermitian_residual(op.m);
  return op;
}

void write_matrix_text(const OperatorMatrix& op, std::ostream& os) {
  os << "# n=" << op.grid.n << " hbar=" << op.grid.hbar << " L=" << op.grid.L << "\n";
  os.precision(17);
  for (int i = 0; i < op.grid.n; ++i) {
    for (int j = 0; j < op.grid.n; ++j) {
      if (j) os << ' ';
      os << op.m(i, j).real() << ',' << op.m(i, j).imag();
    }
    os << '\n';
  }
}

// ------------------------------------------------------------ form operators

Eigen::MatrixXd Tridiagonal::dense() const {
  const int n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = d[i];
  for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = e[i];
  return m;
}

Tridiagonal FormOperator1D::real_form() const {
  // D^* M D with D = diag(phase_j) makes every off-diagonal entry |off_j|.
  Tridiagonal t;
  t.d.resize(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) t.d[i] = diag[i].real();
  t.e.resize(off.size());
  for (std::size_t i = 0; i < off.size(); ++i) t.e[i] = std::abs(off[i]);
  return t;
}

Eigen::MatrixXcd FormOperator1D::dense() const {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = off[i];
    m(i + 1, i) = std::conj(off[i]);
  }
  return m;
}

FormOperator1D assemble_form_operator(const Form& form, const IntervalGrid& grid, double hbar) {
  if (form.empty()) throw DomainError("assemble_form_operator: empty form");
  if (grid.n < 2 || !(grid.hi > grid.lo)) throw DomainError("assemble_form_operator: bad interval grid");
  if (!(hbar > 0.0)) throw DomainError("assemble_form_operator: hbar must be positive");
  check_form_symmetry(form);
  if (form_order(form) > 1 || form.front().alpha.dim() != 1)
    throw DomainError("assemble_form_operator: only m = 1, d = 1 forms are supported");
  const int n = grid.n;
  const double h = grid.h();
  // H = S + F + F^*: S from the alpha = beta terms, F from c hD (alpha = 0,
  // beta = 1). The (1, 0) partner of each first-order term is F^*.
  std::vector<cplx> sd(n, 0.0), su(n - 1, 0.0);
  std::vector<cplx> fd(n, 0.0), fu(n - 1, 0.0), fl(n - 1, 0.0);
  // Edge j joins node j and node j + 1; edges -1 and n - 1 touch the walls.
  auto edge = [&](int j) { return grid.lo + (j + 1.5) * h; };
  for (const FormTerm& t : form) {
    const int a = t.alpha[0], b = t.beta[0];
    if (a == 1 && b == 1) {
      for (int j = -1; j < n; ++j) {
        const cplx w = t.factor * t.field->eval(edge(j)) * (hbar * hbar / (h * h));
        if (j >= 0) sd[j] += w;
        if (j + 1 < n) sd[j + 1] += w;
        if (j >= 0 && j + 1 < n) su[j] -= w;
      }
    } else if (a == 0 && b == 0) {
      for (int j = 0; j < n; ++j) sd[j] += t.factor * t.field->eval(grid.x(j));
    } else if (a == 0 && b == 1) {
      // w (u_{j+1} - u_j) lands on rows j and j + 1.
      for (int j = -1; j < n; ++j) {
        const cplx w = t.factor * t.field->eval(edge(j)) * cplx(0.0, -hbar / (2.0 * h));
        if (j >= 0) {
          fd[j] -= w;
          if (j + 1 < n) fu[j] += w;
        }
        if (j + 1 < n) {
          fd[j + 1] += w;
          if (j >= 0) fl[j] -= w;
        }
      }
    }
  }
  FormOperator1D op;
  op.grid = grid;
  op.hbar = hbar;
  op.diag.resize(n);
  op.off.resize(n - 1);
  double resid = 0.0;
  for (int j = 0; j < n; ++j) {
    op.diag[j] = sd[j] + fd[j] + std::conj(fd[j]);
    resid = std::max(resid, std::abs(op.diag[j].imag()));
  }
  for (int j = 0; j + 1 < n; ++j) op.off[j] = su[j] + fu[j] + std::conj(fl[j]);
  op.symmetry_residual = resid;
  if (resid > 1e-12 * std::max(1.0, hbar * hbar / (h * h)))
    throw DomainError("assemble_form_operator: assembly is not symmetric (residual " + std::to_string(resid) + ")");
  return op;
}

}  // namespace semiweyl
