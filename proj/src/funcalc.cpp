#include "semiweyl/funcalc.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace semiweyl {

namespace {

const cplx kI(0.0, 1.0);

cplx ipow(cplx base, int n) {
  cplx r = 1.0;
  for (int k = 0; k < n; ++k) r *= base;
  return r;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

const SymbolExpr& ResolventSymbolSeries::coefficient(int j, int k) const {
  static const SymbolExpr zero;
  auto it = d.find({j, k});
  return it == d.end() ? zero : it->second;
}

int ResolventSymbolSeries::max_power(int j) const {
  int m = -1;
  for (const auto& [key, e] : d)
    if (key.first == j) m = std::max(m, key.second);
  return m;
}

ResolventSymbolSeries resolvent_symbols(const SymbolSeries& base, int order) {
  if (base.empty()) throw DomainError("resolvent_symbols: empty base series");
  if (order < 0 || order > kMaxResolventOrder)
    throw DomainError("resolvent_symbols: order must lie in [0, " + std::to_string(kMaxResolventOrder) + "]");
  const int dim = base.front().dim();
  const SymbolicContext ctx = SymbolicContext::from_series(base);
  ResolventSymbolSeries out;
  out.base = base;
  out.order = order;
  out.b.push_back(SymbolExpr::atom(SymAtom::resolvent(dim)));
  for (int n = 1; n <= order; ++n) {
    SymbolExpr acc;
    for (int l = 0; l < n; ++l) {
      for (int k = 0; k <= n - l; ++k) {
        const int rest = n - l - k;
        for (int ia = 0; ia <= rest; ++ia) {
          for_each_multi_index(dim, ia, [&](const MultiIndex& alpha) {
            for_each_multi_index(dim, rest - ia, [&](const MultiIndex& beta) {
              // (1/a!b!) (1/2)^|a| (-1/2)^|b| (d_p^a D_x^b a_k)(d_p^b D_x^a b_l)
              if (ctx.vanishes(k, beta, alpha)) return;
              SymbolExpr right = expr_derivative(out.b[l], alpha, beta, ctx);
              if (right.is_zero()) return;
              const cplx w = std::pow(0.5, ia) * std::pow(-0.5, rest - ia) * ipow(-kI, rest) /
                             (alpha.factorial() * beta.factorial());
              acc += SymbolExpr::atom(SymAtom::coef(k, beta, alpha), 1, w) * right;
            });
          });
        }
      }
    }
    SymbolExpr bn = SymbolExpr::atom(SymAtom::resolvent(dim), 1, -1.0) * acc;
    bn.prune(1e-12);
    out.b.push_back(bn);
  }
  // Split by powers of B.
  for (int j = 1; j <= order; ++j) {
    for (const auto& [m, c] : out.b[j].terms()) {
      int power = 0;
      SymbolExpr::Monomial rest;
      for (const auto& [a, e] : m) {
        if (a.kind == SymAtom::Kind::resolvent)
          power = e;
        else
          rest.emplace_back(a, e);
      }
      SymbolExpr& slot = out.d[{j, power - 1}];
      SymbolExpr piece;
      piece.add_term(rest, c);
      slot += piece;
    }
  }
  for (auto it = out.d.begin(); it != out.d.end();) it = it->second.is_zero() ? out.d.erase(it) : std::next(it);
  // Every atom must be evaluable with the available smoothness.
  SymbolEvaluator check(base);
  for (const auto& [key, e] : out.d) check.prepare(e);
  return out;
}

std::vector<SymbolExpr> funcalc_symbols(const ResolventSymbolSeries& series, int order) {
  if (order > series.order) throw DomainError("funcalc_symbols: order exceeds the resolvent series");
  const int dim = series.base.front().dim();
  std::vector<SymbolExpr> out{SymbolExpr::atom(SymAtom::outer(0, dim))};
  for (int j = 1; j <= order; ++j) {
    SymbolExpr s;
    for (int k = 1; k <= series.max_power(j); ++k) {
      const SymbolExpr& d = series.coefficient(j, k);
      if (d.is_zero()) continue;
      const double w = ((k & 1) ? -1.0 : 1.0) / factorial(k);
      s += d * SymbolExpr::atom(SymAtom::outer(k, dim), 1, w);
    }
    s.prune(1e-12);
    out.push_back(s);
  }
  return out;
}

// ------------------------------------------------------------ almost analytic

AlmostAnalyticExtension::AlmostAnalyticExtension(ProfilePtr f, int n, double lambda)
    : f_(std::move(f)), n_(n), lambda_(lambda) {
  if (!f_) throw DomainError("almost_analytic_extend: missing profile");
  if (n < 0) throw DomainError("almost_analytic_extend: n must be non-negative");
  if (n + 1 > f_->max_order()) throw DomainError("almost_analytic_extend: profile has too few derivatives");
  if (!(lambda > 0.0)) throw DomainError("almost_analytic_extend: lambda must be positive");
}

cplx AlmostAnalyticExtension::value(double x, double y) const {
  const double w = plateau_bump(y / lambda_, 1.0, 2.0);
  if (w == 0.0) return 0.0;
  const std::vector<double> fd = f_->derivs(n_, x);
  cplx s = 0.0, iy = 1.0;
  for (int r = 0; r <= n_; ++r) {
    s += fd[r] * iy / factorial(r);
    iy *= cplx(0.0, y);
  }
  return s * w;
}

cplx AlmostAnalyticExtension::dbar(double x, double y) const {
  const double t = y / lambda_;
  if (std::abs(t) >= 2.0) return 0.0;
  const Jet wj = plateau_bump(Jet::variable(1, t), 1.0, 2.0);
  const double w = wj.value(), dw = wj.derivative(1) / lambda_;
  const std::vector<double> fd = f_->derivs(n_ + 1, x);
  cplx taylor = 0.0, iy = 1.0;
  for (int r = 0; r <= n_; ++r) {
    taylor += fd[r] * iy / factorial(r);
    if (r < n_) iy *= cplx(0.0, y);
  }
  // iy now holds (iy)^n.
  return 0.5 * fd[n_ + 1] * iy / factorial(n_) * w + 0.5 * kI * taylor * dw;
}

AlmostAnalyticExtension almost_analytic_extend(ProfilePtr f, int n, double lambda) {
  return AlmostAnalyticExtension(std::move(f), n, lambda);
}

// ------------------------------------------------------------ Helffer-Sjostrand

namespace {

struct Node {
  cplx z;
  cplx weight;  // quadrature weight times dbar f~(z)
};

// Inverse of z - T for real symmetric tridiagonal T (diagonal a, off b),
// added into acc with factor w. Im z > 0 keeps every pivot away from zero.
void add_tridiagonal_resolvent(const Eigen::VectorXd& a, const Eigen::VectorXd& b, cplx z, cplx w,
                               Eigen::MatrixXcd& acc, std::vector<cplx>& piv, std::vector<cplx>& l,
                               std::vector<cplx>& y) {
  const int n = static_cast<int>(a.size());
  piv[0] = z - a[0];
  for (int i = 1; i < n; ++i) {
    l[i] = -b[i - 1] / piv[i - 1];
    piv[i] = (z - a[i]) - l[i] * (-b[i - 1]);
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) y[i] = 0.0;
    y[j] = 1.0;
    for (int i = j + 1; i < n; ++i) y[i] = -l[i] * y[i - 1];
    // back substitution in place
    y[n - 1] /= piv[n - 1];
    for (int i = n - 2; i >= 0; --i) y[i] = (y[i] + b[i] * y[i + 1]) / piv[i];
    for (int i = 0; i < n; ++i) acc(i, j) += w * y[i];
  }
}

std::vector<Node> hs_nodes(const AlmostAnalyticExtension& ext, double xa, double xb, int qx, int qy,
                           const HsQuadrature& quad, double y_stop) {
  const GaussRule& gx = gauss_legendre(qx);
  const GaussRule& gy = gauss_legendre(qy);
  const double width = std::min(quad.panel_width, 0.1 * ext.lambda());
  const int panels = std::max(1, static_cast<int>(std::ceil((xb - xa) / width)));
  const double pw = (xb - xa) / panels;
  std::vector<Node> nodes;
  std::vector<std::pair<double, double>> bands;
  const double lam = ext.lambda();
  for (int k = 0; k < quad.cutoff_panels; ++k)
    bands.emplace_back(lam * (2.0 - double(k + 1) / quad.cutoff_panels), lam * (2.0 - double(k) / quad.cutoff_panels));
  for (double hi = lam; hi > y_stop * (1.0 + 1e-12); hi *= 0.5) bands.emplace_back(std::max(0.5 * hi, y_stop), hi);
  for (const auto& [lo, hi] : bands) {
    for (int iy = 0; iy < qy; ++iy) {
      const double y = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gy.nodes[iy];
      const double wy = 0.5 * (hi - lo) * gy.weights[iy];
      for (int p = 0; p < panels; ++p) {
        const double a = xa + p * pw;
        for (int ix = 0; ix < qx; ++ix) {
          const double x = a + 0.5 * pw * (1.0 + gx.nodes[ix]);
          const double wx = 0.5 * pw * gx.weights[ix];
          const cplx d = ext.dbar(x, y);
          if (d != cplx(0.0)) nodes.push_back({cplx(x, y), wx * wy * d});
        }
      }
    }
  }
  return nodes;
}

Eigen::MatrixXcd hs_sum(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const std::vector<Node>& nodes,
                        int threads) {
  const int n = static_cast<int>(a.size());
  constexpr std::size_t kChunk = 32;
  const std::size_t chunks = (nodes.size() + kChunk - 1) / kChunk;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n, n);
  const std::size_t wave = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t c0 = 0; c0 < chunks; c0 += wave) {
    const std::size_t c1 = std::min(chunks, c0 + wave);
    std::vector<Eigen::MatrixXcd> part(c1 - c0);
    parallel_for(c1 - c0, threads, [&](std::size_t k) {
      Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
      std::vector<cplx> piv(n), l(n), y(n);
      const std::size_t lo = (c0 + k) * kChunk, hi = std::min(nodes.size(), lo + kChunk);
      for (std::size_t i = lo; i < hi; ++i) add_tridiagonal_resolvent(a, b, nodes[i].z, nodes[i].weight, acc, piv, l, y);
      part[k] = std::move(acc);
    });
    for (auto& p : part) total += p;
  }
  return total;
}

double auto_lambda(const FunctionProfile& f, double xa, double xb, int n) {
  std::vector<double> sup(n + 2, 0.0);
  for (int i = 0; i <= 2000; ++i) {
    const std::vector<double> d = f.derivs(n + 1, xa + (xb - xa) * i / 2000.0);
    for (int r = 0; r <= n + 1; ++r) sup[r] = std::max(sup[r], std::abs(d[r]));
  }
  double lambda = 1.0;
  const double cap = 4.0 * std::max(sup[0], 1e-300);
  for (int r = 1; r <= n + 1; ++r)
    if (sup[r] > 0.0) lambda = std::min(lambda, std::pow(cap * factorial(r) / sup[r], 1.0 / r));
  return lambda;
}

}  // namespace

Eigen::MatrixXcd hs_apply(const Eigen::MatrixXcd& H, ProfilePtr f, int n, const HsQuadrature& quad,
                          HsReport* report) {
  if (n < 2) throw DomainError("hs_apply: need at least 2 extension terms");
  if (H.rows() != H.cols() || H.rows() == 0) throw DomainError("hs_apply: matrix must be square");
  const double resid = hermitian_residual(H);
  if (resid > 1e-10 * std::max(1.0, H.cwiseAbs().maxCoeff()))
    throw DomainError("hs_apply: matrix is not self-adjoint (residual " + std::to_string(resid) + ")");
  if (!f->support()) throw DomainError("hs_apply: profile must have compact support");
  const auto [xa, xb] = *f->support();
  HsQuadrature q = quad;
  if (q.lambda <= 0.0) q.lambda = auto_lambda(*f, xa, xb, n);
  const AlmostAnalyticExtension ext(f, n, q.lambda);

  // Tail below the last band: |dbar f~| <= sup|f^{(n+1)}| y^n / (2 n!) and
  // |(z - H)^{-1}| <= 1 / y.
  double sup = 0.0;
  for (int i = 0; i <= 2000; ++i) sup = std::max(sup, std::abs(f->deriv(n + 1, xa + (xb - xa) * i / 2000.0)));
  const double coef = (xb - xa) * sup / (2.0 * factorial(n) * n) / std::numbers::pi;
  double y_stop = q.y_floor * q.lambda;
  for (double y = q.lambda; y > q.y_floor * q.lambda; y *= 0.5) {
    if (2.0 * coef * std::pow(y, n) <= 0.01 * q.tol) {
      y_stop = y;
      break;
    }
  }
  const double tail = 2.0 * coef * std::pow(y_stop, n);

  Eigen::MatrixXcd Hs = 0.5 * (H + H.adjoint());
  Eigen::Tridiagonalization<Eigen::MatrixXcd> tri(Hs);
  const Eigen::VectorXd a = tri.diagonal();
  const Eigen::VectorXd b = tri.subDiagonal();
  const Eigen::MatrixXcd Q = tri.matrixQ();

  auto evaluate = [&](int qx, int qy, std::size_t& count) {
    const std::vector<Node> nodes = hs_nodes(ext, xa, xb, qx, qy, q, y_stop);
    count = nodes.size();
    const Eigen::MatrixXcd S = hs_sum(a, b, nodes, q.threads);
    // f(H) = -(1/pi) (I + I^*), I the upper half-plane part.
    return Eigen::MatrixXcd(-(1.0 / std::numbers::pi) * (Q * (S + S.adjoint()) * Q.adjoint()));
  };
  std::size_t n1 = 0, n2 = 0;
  const Eigen::MatrixXcd low = evaluate(quad.qx, quad.qy, n1);
  const Eigen::MatrixXcd high = evaluate(quad.qx_check, quad.qy_check, n2);
  const double est = spectral_norm(high - low) + tail;
  if (report) {
    report->error_estimate = est;
    report->tail_bound = tail;
    report->nodes = n1 + n2;
    int bands = 0;
    for (double y = q.lambda; y > y_stop * (1.0 + 1e-12); y *= 0.5) ++bands;
    report->bands = bands;
  }
  if (est > quad.tol) throw ConvergenceError("hs_apply: quadrature estimate exceeds tolerance", est);
  return high;
}

OperatorMatrix hs_apply(const OperatorMatrix& H, ProfilePtr f, int n, const HsQuadrature& quad, HsReport* report) {
  OperatorMatrix out;
  out.grid = H.grid;
  out.m = hs_apply(H.m, std::move(f), n, quad, report);
  out.hermitian_residual = hermitian_residual(out.m);
  return out;
}

Eigen::MatrixXcd eig_apply(const Eigen::MatrixXcd& H, const FunctionProfile& f) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H + H.adjoint()));
  Eigen::VectorXd fv(es.eigenvalues().size());
  for (int i = 0; i < fv.size(); ++i) fv[i] = f.eval(es.eigenvalues()[i]);
  return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

// ------------------------------------------------------------ trace terms

namespace {

// Half-width P of the p-range outside of which a_0(x, p) exceeds s_hi for
// every sampled x.
double momentum_extent(const PolySymbol& a0, const std::vector<double>& xs, double s_hi) {
  double P = 0.5;
  for (int iter = 0; iter < 60; ++iter) {
    bool ok = true;
    for (double x : xs) {
      for (double sgn : {-1.0, 1.0}) {
        // Require a_0 > s_hi on [P, 2P] so the support cannot reappear.
        for (int k = 0; k <= 8 && ok; ++k) {
          const double p = sgn * P * (1.0 + k / 8.0);
          if (a0.eval(x, p).real() <= s_hi) ok = false;
        }
      }
      if (!ok) break;
    }
    if (ok) return P;
    P *= 1.5;
  }
  throw DomainError("trace_expansion_terms: f(a_0) is not compactly supported in p");
}

}  // namespace

std::vector<double> trace_expansion_terms(const ResolventSymbolSeries& series, ProfilePtr f, int order,
                                          const PhaseQuadrature& quad) {
  if (!f->support()) throw DomainError("trace_expansion_terms: profile must have compact support");
  if (series.base.front().dim() != 1) throw DomainError("trace_expansion_terms: one-dimensional symbols only");
  const std::vector<SymbolExpr> af = funcalc_symbols(series, order);
  SymbolEvaluator ev(series.base);
  std::vector<SymbolEvaluator::Compiled> comp;
  for (const SymbolExpr& e : af) ev.prepare(e);
  for (const SymbolExpr& e : af) comp.push_back(ev.compile(e));

  const GaussRule& g = gauss_legendre(quad.q);
  std::vector<double> xs, wx;
  const double px = (quad.x_hi - quad.x_lo) / quad.x_panels;
  for (int p = 0; p < quad.x_panels; ++p)
    for (int i = 0; i < quad.q; ++i) {
      xs.push_back(quad.x_lo + px * (p + 0.5 * (1.0 + g.nodes[i])));
      wx.push_back(0.5 * px * g.weights[i]);
    }
  const double P = momentum_extent(series.base.front(), xs, f->support()->second);
  std::vector<double> ps, wp;
  const double pp = 2.0 * P / quad.p_panels;
  for (int p = 0; p < quad.p_panels; ++p)
    for (int i = 0; i < quad.q; ++i) {
      ps.push_back(-P + pp * (p + 0.5 * (1.0 + g.nodes[i])));
      wp.push_back(0.5 * pp * g.weights[i]);
    }
  const SymbolEvaluator::Inputs in{cplx(0.0), f.get()};
  const std::size_t nt = af.size();
  const std::vector<std::vector<double>> rows =
      parallel_map<std::vector<double>>(xs.size(), quad.threads, [&](std::size_t i) {
        const double x = xs[i];
        const SymbolEvaluator::Frozen fx = ev.freeze(Point(&x, 1));
        std::vector<double> acc(nt, 0.0);
        for (std::size_t k = 0; k < ps.size(); ++k) {
          const double p = ps[k];
          for (std::size_t j = 0; j < nt; ++j) acc[j] += wp[k] * ev.eval(comp[j], fx, Point(&p, 1), in).real();
        }
        for (double& v : acc) v *= wx[i];
        return acc;
      });
  std::vector<double> out(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    std::vector<double> col(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][j];
    out[j] = pairwise_sum(col);
  }
  return out;
}

OperatorMatrix quantize_funcalc(const ResolventSymbolSeries& series, ProfilePtr f, int order, const PhaseGrid& grid,
                                const QuantizeOptions& opt) {
  const std::vector<SymbolExpr> af = funcalc_symbols(series, order);
  SymbolEvaluator ev(series.base);
  for (const SymbolExpr& e : af) ev.prepare(e);
  std::vector<SymbolEvaluator::Compiled> comp;
  for (const SymbolExpr& e : af) comp.push_back(ev.compile(e));
  const SymbolEvaluator::Inputs in{cplx(0.0), f.get()};
  const double hbar = grid.hbar;
  return weyl_quantize_function(
      [&](double x, std::span<const double> p, std::span<cplx> out) {
        const SymbolEvaluator::Frozen fx = ev.freeze(Point(&x, 1));
        for (std::size_t k = 0; k < p.size(); ++k) {
          cplx s = 0.0, hp = 1.0;
          for (const auto& c : comp) {
            s += hp * ev.eval(c, fx, p.subspan(k, 1), in);
            hp *= hbar;
          }
          out[k] = s;
        }
      },
      grid, opt);
}

}  // namespace semiweyl
