#include "semiweyl/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "semiweyl/errors.hpp"

namespace semiweyl {

// ------------------------------------------------------------ regions

namespace {

bool above_on_segment(const PolySymbol& a0, double E, double x0, double p0, double x1, double p1, int n) {
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    if (!(a0.eval(x0 + t * (x1 - x0), p0 + t * (p1 - p0)).real() > E)) return false;
  }
  return true;
}

}  // namespace

PhaseSpaceRegion certify_region(const PolySymbol& a0, double E, const RegionOptions& opt) {
  if (a0.dim() != 1) throw DomainError("certify_region: one-dimensional symbols only");
  double X = opt.initial, P = opt.initial;
  const int n = opt.boundary_samples;
  for (int iter = 0; iter < 80; ++iter) {
    const double xl = opt.x_range ? opt.x_range->first : -X;
    const double xh = opt.x_range ? opt.x_range->second : X;
    const bool p_ok = above_on_segment(a0, E, xl, -P, xh, -P, n) && above_on_segment(a0, E, xl, P, xh, P, n);
    const bool x_ok = opt.x_range ||
                      (above_on_segment(a0, E, xl, -P, xl, P, n) && above_on_segment(a0, E, xh, -P, xh, P, n));
    if (p_ok && x_ok) {
      PhaseSpaceRegion r;
      r.a0 = a0;
      r.E = E;
      r.x_lo = xl;
      r.x_hi = xh;
      r.p_lo = -P;
      r.p_hi = P;
      return r;
    }
    if (!x_ok) X *= 2.0;
    if (!p_ok) P *= 2.0;
    if (X > 1048576.0 || P > 1048576.0) break;
  }
  throw DomainError("certify_region: sublevel set {a_0 <= " + std::to_string(E) + "} is not certified compact");
}

// ------------------------------------------------------------ subdivision volume

namespace {

struct Box {
  double x0, x1, p0, p1;
  double area() const { return (x1 - x0) * (p1 - p0); }
};

// Area of {(x, p) in box : c + gx (x - xc) + gp (p - pc) <= 0}.
double linear_cut_area(const Box& b, double c, double gx, double gp) {
  const double xc = 0.5 * (b.x0 + b.x1), pc = 0.5 * (b.p0 + b.p1);
  const std::array<std::array<double, 2>, 4> box = {{{b.x0, b.p0}, {b.x1, b.p0}, {b.x1, b.p1}, {b.x0, b.p1}}};
  auto f = [&](const std::array<double, 2>& v) { return c + gx * (v[0] - xc) + gp * (v[1] - pc); };
  std::vector<std::array<double, 2>> poly;
  for (int i = 0; i < 4; ++i) {
    const auto& u = box[i];
    const auto& v = box[(i + 1) % 4];
    const double fu = f(u), fv = f(v);
    if (fu <= 0.0) poly.push_back(u);
    if ((fu < 0.0 && fv > 0.0) || (fu > 0.0 && fv < 0.0)) {
      const double t = fu / (fu - fv);
      poly.push_back({u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1])});
    }
  }
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& u = poly[i];
    const auto& v = poly[(i + 1) % poly.size()];
    a += u[0] * v[1] - v[0] * u[1];
  }
  return 0.5 * std::abs(a);
}

// Least-squares plane through a 3x3 block of samples v[i][j] (i along x)
// starting at (i0, j0) with stride s in a grid of spacing (hx, hp).
template <class Grid>
double block_cut(const Grid& v, int i0, int j0, int s, const Box& b, double E) {
  double mean = 0.0, sx = 0.0, sp = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double val = v[i0 + s * i][j0 + s * j] - E;
      mean += val;
      sx += val * (i - 1);
      sp += val * (j - 1);
    }
  const double hx = 0.5 * (b.x1 - b.x0), hp = 0.5 * (b.p1 - b.p0);
  return linear_cut_area(b, mean / 9.0, sx / (6.0 * hx), sp / (6.0 * hp));
}

class Subdivider {
 public:
  Subdivider(const PolySymbol& a0, double E, int min_depth, int cap) : a0_(a0), E_(E), min_depth_(min_depth), cap_(cap) {}

  double run(const Box& b, int depth) {
    std::array<std::array<double, 3>, 3> v;
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        v[i][j] = a0_.eval(b.x0 + 0.5 * i * (b.x1 - b.x0), b.p0 + 0.5 * j * (b.p1 - b.p0)).real();
        lo = std::min(lo, v[i][j]);
        hi = std::max(hi, v[i][j]);
      }
    const double spread = hi - lo;
    if (depth >= min_depth_) {
      if (lo - spread > E_) return 0.0;
      if (hi + spread <= E_) return b.area();
    }
    const double xm = 0.5 * (b.x0 + b.x1), pm = 0.5 * (b.p0 + b.p1);
    const Box kids[4] = {{b.x0, xm, b.p0, pm}, {xm, b.x1, b.p0, pm}, {b.x0, xm, pm, b.p1}, {xm, b.x1, pm, b.p1}};
    if (depth < cap_) {
      double s = 0.0;
      for (const Box& k : kids) s += run(k, depth + 1);
      return s;
    }
    std::array<std::array<double, 5>, 5> g;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        g[i][j] = (i % 2 == 0 && j % 2 == 0)
                      ? v[i / 2][j / 2]
                      : a0_.eval(b.x0 + 0.25 * i * (b.x1 - b.x0), b.p0 + 0.25 * j * (b.p1 - b.p0)).real();
    const double coarse = block_cut(g, 0, 0, 2, b, E_);
    const double fine = block_cut(g, 0, 0, 1, kids[0], E_) + block_cut(g, 2, 0, 1, kids[1], E_) +
                        block_cut(g, 0, 2, 1, kids[2], E_) + block_cut(g, 2, 2, 1, kids[3], E_);
    error_ += std::abs(fine - coarse);
    ++leaves_;
    return fine;
  }

  double error() const { return error_; }
  std::size_t leaves() const { return leaves_; }

 private:
  const PolySymbol& a0_;
  double E_;
  int min_depth_;
  int cap_;
  double error_ = 0.0;
  std::size_t leaves_ = 0;
};

}  // namespace

VolumeResult weyl_volume(const PolySymbol& a0, double E, const VolumeOptions& opt) {
  const PhaseSpaceRegion r = certify_region(a0, E, opt.region);
  const Box root{r.x_lo, r.x_hi, r.p_lo, r.p_hi};
  VolumeResult out;
  for (int cap = std::min(opt.min_depth + 4, opt.max_depth); cap <= opt.max_depth; ++cap) {
    Subdivider s(a0, E, opt.min_depth, cap);
    out.value = s.run(root, 0);
    out.error_estimate = s.error();
    out.leaves = s.leaves();
    out.depth = cap;
    if (out.error_estimate <= opt.abs_tol) break;
  }
  return out;
}

// ------------------------------------------------------------ fiber quadrature

namespace {

struct Quadratic {
  double c0, c1, c2;
};

Quadratic quadratic_at(const PolySymbol& a0, double x) {
  const Point px(&x, 1);
  auto c = [&](int k) { return eval_coeff(a0.coefficient(MultiIndex{k}), px).real(); };
  return {c(0), c(1), c(2)};
}

std::vector<double> p_coefficients(const PolySymbol& w, double x) {
  std::vector<double> b(w.order() + 1, 0.0);
  const Point px(&x, 1);
  for (const auto& [alpha, c] : w.terms()) b[alpha[0]] = eval_coeff(c, px).real();
  return b;
}

double beta_fn(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

}  // namespace

FiberIntegrator::FiberIntegrator(const PolySymbol& a0, Options opt) : a0_(a0), opt_(opt) {
  if (a0.dim() != 1) throw DomainError("FiberIntegrator: one-dimensional symbols only");
  if (a0.order() != 2) throw DomainError("FiberIntegrator: a_0 must be quadratic in p");
  grid_.resize(opt.scan + 1);
  bottom_grid_.resize(opt.scan + 1);
  for (int i = 0; i <= opt.scan; ++i) {
    grid_[i] = opt.x_lo + (opt.x_hi - opt.x_lo) * i / opt.scan;
    if (!(quadratic_at(a0, grid_[i]).c2 > 0.0))
      throw DomainError("FiberIntegrator: p^2 coefficient must be positive on the x-range");
    bottom_grid_[i] = bottom(grid_[i]);
  }
}

double FiberIntegrator::bottom(double x) const {
  const Quadratic q = quadratic_at(a0_, x);
  return q.c0 - q.c1 * q.c1 / (4.0 * q.c2);
}

double FiberIntegrator::minimum() const {
  const auto it = std::min_element(bottom_grid_.begin(), bottom_grid_.end());
  // golden-section refinement around the best grid point
  const std::size_t i = static_cast<std::size_t>(it - bottom_grid_.begin());
  double a = grid_[i > 0 ? i - 1 : i], b = grid_[std::min(i + 1, grid_.size() - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int k = 0; k < 80; ++k) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (bottom(c) < bottom(d))
      b = d;
    else
      a = c;
  }
  return std::min(*it, bottom(0.5 * (a + b)));
}

std::vector<std::pair<double, double>> FiberIntegrator::turning_points(double s) const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    const double fa = bottom_grid_[i] - s, fb = bottom_grid_[i + 1] - s;
    if ((fa < 0.0) == (fb < 0.0)) continue;
    double a = grid_[i], b = grid_[i + 1];
    for (int k = 0; k < 100 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++k) {
      const double m = 0.5 * (a + b);
      if ((bottom(m) - s < 0.0) == (fa < 0.0))
        a = m;
      else
        b = m;
    }
    const double x = 0.5 * (a + b);
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    out.emplace_back(x, std::abs(bottom(x + h) - bottom(x - h)) / (2.0 * h));
  }
  return out;
}

template <class Fiber>
double FiberIntegrator::integrate_wells(double s, Fiber&& fiber) const {
  // Intervals of the x-range where the well bottom lies below s.
  std::vector<double> ends;
  if (bottom_grid_.front() < s) ends.push_back(opt_.x_lo);
  for (const auto& tp : turning_points(s)) ends.push_back(tp.first);
  if (bottom_grid_.back() < s) ends.push_back(opt_.x_hi);
  if (ends.size() % 2 != 0) throw DomainError("FiberIntegrator: inconsistent turning points");
  const GaussRule& g = gauss_legendre(opt_.q);
  std::vector<double> terms;
  for (std::size_t k = 0; k < ends.size(); k += 2) {
    const double xa = ends[k], xb = ends[k + 1];
    // x = xa + (xb - xa)(1 - cos th)/2 removes the square-root endpoint behaviour.
    const double hth = std::numbers::pi / opt_.panels;
    for (int p = 0; p < opt_.panels; ++p)
      for (int i = 0; i < opt_.q; ++i) {
        const double th = hth * (p + 0.5 * (1.0 + g.nodes[i]));
        const double x = xa + 0.5 * (xb - xa) * (1.0 - std::cos(th));
        const double jac = 0.5 * (xb - xa) * std::sin(th);
        terms.push_back(0.5 * hth * g.weights[i] * jac * fiber(x));
      }
  }
  return pairwise_sum(terms);
}

double FiberIntegrator::power_moment(const PolySymbol& w, double s, double beta) const {
  if (!(beta > -1.0)) throw DomainError("FiberIntegrator: beta must exceed -1");
  return integrate_wells(s, [&](double x) {
    const Quadratic q = quadratic_at(a0_, x);
    const double m = q.c0 - q.c1 * q.c1 / (4.0 * q.c2);
    if (!(m < s)) return 0.0;
    const double center = -q.c1 / (2.0 * q.c2);
    const double r = std::sqrt((s - m) / q.c2);
    // w(center + u) = sum_j e_j u^j
    const std::vector<double> b = p_coefficients(w, x);
    std::vector<double> e(b.size(), 0.0);
    for (std::size_t k = 0; k < b.size(); ++k) {
      double binom = 1.0;
      for (std::size_t j = 0; j <= k; ++j) {
        e[j] += b[k] * binom * std::pow(center, static_cast<double>(k - j));
        binom *= static_cast<double>(k - j) / static_cast<double>(j + 1);
      }
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < e.size(); j += 2)
      acc += e[j] * std::pow(q.c2, beta) * std::pow(r, static_cast<double>(j) + 2.0 * beta + 1.0) *
             beta_fn(0.5 * (static_cast<double>(j) + 1.0), beta + 1.0);
    return acc;
  });
}

double FiberIntegrator::weighted_volume(const PolySymbol& w, double s) const { return power_moment(w, s, 0.0); }

double FiberIntegrator::volume(double s) const { return weighted_volume(monomial_symbol(MultiIndex{0}), s); }

// ------------------------------------------------------------ Riesz terms

RieszTerms riesz_phase_terms(const PolySymbol& a0, const PolySymbol& a1, double gamma, const RieszOptions& opt) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("riesz_phase_terms: gamma must lie in (0, 1]");
  const FiberIntegrator fine(a0, opt.fiber);
  for (const auto& [x, slope] : fine.turning_points(0.0))
    if (slope < opt.gradient_floor)
      throw DomainError("riesz_phase_terms: 0 is not a non-critical value (|grad a_0| = " + std::to_string(slope) +
                        " at x = " + std::to_string(x) + ")");
  FiberIntegrator::Options half = opt.fiber;
  half.panels = std::max(1, opt.fiber.panels / 2);
  const FiberIntegrator coarse(a0, half);
  const PolySymbol one = monomial_symbol(MultiIndex{0});
  RieszTerms t;
  t.psi0 = fine.power_moment(one, 0.0, gamma);
  t.psi0_error = std::abs(t.psi0 - coarse.power_moment(one, 0.0, gamma));
  if (!a1.is_zero()) {
    t.psi1 = -gamma * fine.power_moment(a1, 0.0, gamma - 1.0);
    t.psi1_error = std::abs(t.psi1 + gamma * coarse.power_moment(a1, 0.0, gamma - 1.0));
  }
  return t;
}

double riesz_psi0_layer_cake(const PolySymbol& a0, double gamma, int nodes, const VolumeOptions& opt) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("riesz_psi0_layer_cake: gamma must lie in (0, 1]");
  const PhaseSpaceRegion r = certify_region(a0, 0.0, opt.region);
  auto a = [&](double x, double p) { return a0.eval(x, p).real(); };
  const int n = 256;
  double bx = r.x_lo, bp = r.p_lo, lo = a(bx, bp);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const double x = r.x_lo + (r.x_hi - r.x_lo) * i / n, p = r.p_lo + (r.p_hi - r.p_lo) * j / n;
      if (a(x, p) < lo) lo = a(x, p), bx = x, bp = p;
    }
  if (lo >= 0.0) return 0.0;
  // alternating golden-section refinement of the sampled minimum
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double hx = (r.x_hi - r.x_lo) / n, hp = (r.p_hi - r.p_lo) / n;
  for (int round = 0; round < 30; ++round) {
    for (int axis = 0; axis < 2; ++axis) {
      double u = (axis == 0 ? bx : bp) - (axis == 0 ? hx : hp), v = (axis == 0 ? bx : bp) + (axis == 0 ? hx : hp);
      auto f = [&](double t) { return axis == 0 ? a(t, bp) : a(bx, t); };
      for (int k = 0; k < 60; ++k) {
        const double c = v - gr * (v - u), d = u + gr * (v - u);
        if (f(c) < f(d))
          v = d;
        else
          u = c;
      }
      const double t = 0.5 * (u + v);
      if (f(t) < lo) {
        lo = f(t);
        (axis == 0 ? bx : bp) = t;
      }
    }
    hx *= 0.5;
    hp *= 0.5;
  }
  const double U = std::pow(-lo, gamma);
  const GaussRule& g = gauss_legendre(nodes);
  std::vector<double> terms;
  for (int i = 0; i < nodes; ++i) {
    const double u = 0.5 * U * (1.0 + g.nodes[i]);
    terms.push_back(0.5 * U * g.weights[i] * weyl_volume(a0, -std::pow(u, 1.0 / gamma), opt).value);
  }
  return pairwise_sum(terms);
}

double coarea_density(const PolySymbol& a0, const PolySymbol& w, double s, const CoareaOptions& opt) {
  const FiberIntegrator fi(a0, opt.fiber);
  auto diff = [&](double h) { return (fi.weighted_volume(w, s + h) - fi.weighted_volume(w, s - h)) / (2.0 * h); };
  const double h = opt.step;
  const double d1 = diff(h), d2 = diff(0.5 * h), d3 = diff(0.25 * h);
  const double r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d3 - d2) / 3.0;
  const double gap = std::abs(r1 - r2);
  if (gap > opt.tol * std::max(1.0, std::abs(r2)))
    throw ConvergenceError("coarea_density: Richardson estimates disagree at s = " + std::to_string(s), gap);
  return r2;
}

// ------------------------------------------------------------ stationary phase

cplx ExpansionResult::value() const {
  cplx s = 0.0;
  for (const auto& [j, t] : terms) s += std::pow(hbar, j) * t;
  return s;
}

cplx oscillatory_integral_1d(double B, const std::function<double(double)>& a, double hbar, double lo, double hi) {
  // panels short enough that the phase B v^2 / (2 hbar) turns by at most ~2 per panel
  const double vmax = std::max(std::abs(lo), std::abs(hi));
  const double rate = std::abs(B) * vmax / hbar;
  const int panels = std::max(64, static_cast<int>(std::ceil((hi - lo) * rate / 2.0)));
  const GaussRule& g = gauss_legendre(16);
  const double h = (hi - lo) / panels;
  std::vector<cplx> terms;
  terms.reserve(static_cast<std::size_t>(panels) * 16);
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < 16; ++i) {
      const double v = lo + h * (p + 0.5 * (1.0 + g.nodes[i]));
      terms.push_back(0.5 * h * g.weights[i] * a(v) * std::exp(cplx(0.0, B * v * v / (2.0 * hbar))));
    }
  return pairwise_sum(terms);
}

ExpansionResult stationary_phase_expand(const Eigen::MatrixXd& B, const Amplitude& a, double hbar, int N) {
  const int n = static_cast<int>(B.rows());
  if (n == 0 || B.cols() != n) throw DomainError("stationary_phase_expand: B must be square");
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, B.cwiseAbs().maxCoeff()))
    throw DomainError("stationary_phase_expand: B must be symmetric");
  if (N < 0) throw DomainError("stationary_phase_expand: N must be non-negative");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  int sgn = 0;
  double det = 1.0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev[i]) <= 1e-12 * scale) throw DomainError("stationary_phase_expand: B is singular");
    sgn += ev[i] > 0.0 ? 1 : -1;
    det *= std::abs(ev[i]);
  }
  const Eigen::MatrixXd C = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  const cplx pref = std::pow(2.0 * std::numbers::pi * hbar, 0.5 * n) *
                    std::exp(cplx(0.0, std::numbers::pi * sgn / 4.0)) / std::sqrt(det);

  // Q(xi) = <C xi, xi> as a polynomial; Q^j applied to a at 0.
  std::map<MultiIndex, double> Q;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (C(k, l) != 0.0) Q[MultiIndex::unit(n, k) + MultiIndex::unit(n, l)] += C(k, l);
  std::map<MultiIndex, double> Qj{{MultiIndex::zero(n), 1.0}};
  ExpansionResult out;
  out.hbar = hbar;
  out.method = n == 1 ? "direct-quadrature" : "last-term";
  cplx ipow = 1.0;
  double jfact = 1.0;
  for (int j = 0; j <= N; ++j) {
    if (j > 0) {
      std::map<MultiIndex, double> next;
      for (const auto& [m1, c1] : Qj)
        for (const auto& [m2, c2] : Q) next[m1 + m2] += c1 * c2;
      Qj = std::move(next);
      ipow *= cplx(0.0, 0.5);
      jfact *= j;
    }
    double applied = 0.0;
    for (const auto& [m, c] : Qj) applied += c * a.derivative_at_zero(m);
    out.terms.emplace_back(j, pref * ipow * applied / jfact);
  }
  if (n == 1 && a.value) {
    const cplx direct = oscillatory_integral_1d(B(0, 0), a.value, hbar, -a.radius, a.radius);
    out.remainder_estimate = std::abs(direct - out.value());
  } else {
    out.remainder_estimate = std::abs(std::pow(hbar, N) * out.terms.back().second);
  }
  return out;
}

}  // namespace semiweyl
