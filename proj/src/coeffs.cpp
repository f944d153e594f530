#include "semiweyl/coeffs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "semiweyl/errors.hpp"

namespace semiweyl {

namespace {

using JetFn = std::function<Jet(const Jet&)>;

HoelderField::Oracle jet_oracle(JetFn fn) {
  return [fn = std::move(fn)](const MultiIndex& eta, Point x) {
    const int r = eta[0];
    return fn(Jet::variable(r, x[0])).derivative(r);
  };
}

Jet smooth_part(const Jet& x, const FieldParams& p) {
  Jet acc(x.order(), p.offset);
  if (!p.poly.empty()) {
    Jet h(x.order(), p.poly.back());
    for (int n = static_cast<int>(p.poly.size()) - 2; n >= 0; --n) h = h * x + p.poly[n];
    acc += h;
  }
  for (std::size_t n = 0; n < p.cos_terms.size(); ++n)
    if (p.cos_terms[n] != 0.0) acc += cos(x * (p.omega * n)) * p.cos_terms[n];
  for (std::size_t n = 0; n < p.sin_terms.size(); ++n)
    if (p.sin_terms[n] != 0.0) acc += sin(x * (p.omega * n)) * p.sin_terms[n];
  return acc;
}

int poly_degree(const std::vector<double>& c) {
  for (int n = static_cast<int>(c.size()) - 1; n >= 0; --n)
    if (c[n] != 0.0) return n;
  return 0;
}

bool has_trig(const FieldParams& p) {
  for (double c : p.cos_terms)
    if (c != 0.0) return true;
  for (double c : p.sin_terms)
    if (c != 0.0) return true;
  return false;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double estimate_hoelder_seminorm(const CoefficientField& f, double lo, double hi, int samples) {
  const int k = std::min(f.k(), f.max_order());
  const double mu = f.mu();
  std::vector<double> xs(samples), ds(samples);
  for (int i = 0; i < samples; ++i) {
    xs[i] = lo + (hi - lo) * i / (samples - 1);
    ds[i] = f.deriv1(k, xs[i]);
  }
  double best = 0.0;
  for (int i = 0; i < samples; ++i)
    for (int j = i + 1; j < samples; ++j) {
      const double dist = xs[j] - xs[i];
      const double q = std::abs(ds[j] - ds[i]) / (mu > 0 ? std::pow(dist, mu) : 1.0);
      best = std::max(best, q);
    }
  return best;
}

GrowthBound estimate_growth_bound(const CoefficientField& f, double n0, double lo, double hi, int samples) {
  std::vector<double> v(samples), xs(samples);
  double mn = 1e300;
  for (int i = 0; i < samples; ++i) {
    xs[i] = lo + (hi - lo) * i / (samples - 1);
    v[i] = f.eval(xs[i]);
    mn = std::min(mn, v[i]);
  }
  GrowthBound g;
  g.n0 = n0;
  g.zeta1 = std::max(0.0, 1.0 - mn);
  double c0 = 1.0;
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j) {
      const double r = (v[i] + g.zeta1) / ((v[j] + g.zeta1) * std::pow(1.0 + std::abs(xs[i] - xs[j]), n0));
      c0 = std::max(c0, r);
    }
  g.c0 = 1.5 * c0;
  return g;
}

HoelderPtr make_test_field(FieldFamily family, const FieldParams& params) {
  if (params.k < 0) throw DomainError("make_test_field: k must be >= 0");
  if (!(params.mu >= 0.0 && params.mu <= 1.0)) throw DomainError("make_test_field: mu must lie in [0, 1]");
  const FieldParams p = params;
  const double s = p.k + p.mu;
  HoelderField::Spec spec;
  spec.dim = 1;
  spec.k = p.k;
  spec.mu = p.mu;
  const bool periodic_smooth = poly_degree(p.poly) == 0;
  JetFn core;
  double core_const = -1.0;  // analytic Hoelder constant of the core, if known
  std::ostringstream desc;

  switch (family) {
    case FieldFamily::smooth: {
      spec.max_order = kUnlimitedOrder;
      if (periodic_smooth && has_trig(p)) spec.period = 2.0 * std::numbers::pi / p.omega;
      if (periodic_smooth && !has_trig(p)) spec.period = 2.0 * std::numbers::pi;
      core = [](const Jet& x) { return Jet(x.order(), 0.0); };
      core_const = 0.0;
      desc << "smooth";
      break;
    }
    case FieldFamily::abs_power: {
      if (!(p.mu > 0.0)) throw DomainError("abs_power: mu must be positive (|x|^k is not C^{k,0} for odd k)");
      spec.max_order = p.k;
      if (p.sine_inner && periodic_smooth && (!has_trig(p) || std::abs(p.omega - std::round(p.omega)) < 1e-12))
        spec.period = 2.0 * std::numbers::pi;
      const double scale = p.scale, c = p.center;
      if (p.sine_inner) {
        core = [scale, c, s](const Jet& x) { return abs_pow(sin(x - c), s) * scale; };
      } else {
        core = [scale, c, s](const Jet& x) { return abs_pow(x - c, s) * scale; };
        core_const = std::abs(scale) * std::tgamma(s + 1.0) / std::tgamma(p.mu + 1.0) *
                     (p.k % 2 == 1 ? std::pow(2.0, 1.0 - p.mu) : 1.0);
      }
      desc << fmt(scale) << "*|" << (p.sine_inner ? "sin(x-" : "(x-") << fmt(c) << ")|^" << fmt(s);
      break;
    }
    case FieldFamily::weierstrass: {
      if (!(p.mu > 0.0 && p.mu < 1.0)) throw DomainError("weierstrass: mu must lie in (0, 1)");
      if (!(p.base > 1.0)) throw DomainError("weierstrass: base must exceed 1");
      if (p.terms < 1) throw DomainError("weierstrass: need at least one term");
      spec.max_order = p.k;
      if (periodic_smooth && std::abs(p.base - std::round(p.base)) < 1e-12 &&
          (!has_trig(p) || std::abs(p.omega - std::round(p.omega)) < 1e-12))
        spec.period = 2.0 * std::numbers::pi;
      const double b = p.base, scale = p.scale;
      const int terms = p.terms;
      core = [b, s, scale, terms](const Jet& x) {
        Jet acc(x.order(), 0.0);
        double bn = 1.0;
        for (int n = 1; n <= terms; ++n) {
          bn *= b;
          acc += cos(x * bn) * std::pow(bn, -s);
        }
        return acc * scale;
      };
      // Split the series at b^n |x - y| = 1.
      const double m = p.mu;
      core_const = std::abs(scale) * (std::pow(b, 1.0 - m) / (std::pow(b, 1.0 - m) - 1.0) + 2.0 / (1.0 - std::pow(b, -m)));
      desc << "weierstrass(b=" << fmt(b) << ",s=" << fmt(s) << ",N=" << terms << ")";
      break;
    }
  }

  const FieldParams pp = p;
  JetFn total = [core, pp](const Jet& x) { return core(x) + smooth_part(x, pp); };
  spec.oracle = jet_oracle(total);
  if (p.offset != 0.0) desc << " + " << fmt(p.offset);
  if (poly_degree(p.poly) > 0 || (!p.poly.empty() && p.poly[0] != 0.0)) desc << " + poly";
  if (has_trig(p)) desc << " + trig";
  spec.description = desc.str();

  // Hoelder constant: analytic core bound plus a sampled bound of the rest.
  const double lo = -p.window, hi = p.window;
  {
    HoelderField::Spec tmp = spec;
    if (core_const >= 0.0) {
      tmp.oracle = jet_oracle([pp](const Jet& x) { return smooth_part(x, pp); });
      tmp.max_order = kUnlimitedOrder;
      HoelderField rest(tmp);
      spec.hoelder_const = core_const + 1.5 * estimate_hoelder_seminorm(rest, lo, hi, 401);
    } else {
      HoelderField whole(tmp);
      spec.hoelder_const = 1.5 * estimate_hoelder_seminorm(whole, lo, hi, 401);
    }
    if (!(spec.hoelder_const > 0.0)) spec.hoelder_const = 1e-300;
  }
  {
    HoelderField tmp(spec);
    spec.growth = estimate_growth_bound(tmp, poly_degree(p.poly), 2.0 * lo, 2.0 * hi, 321);
  }
  return std::make_shared<HoelderField>(std::move(spec));
}

// ---------------------------------------------------------------- kernel

MollifierKernel::MollifierKernel(Params params) : params_(params) {
  if (!(params_.plateau > 0.0 && params_.cutoff > params_.plateau))
    throw DomainError("MollifierKernel: need 0 < plateau < cutoff");
  // xi rule on [0, cutoff], resolving cos(y xi) for |y| up to the radius.
  const double a = params_.plateau, b = params_.cutoff;
  const int panels = static_cast<int>(std::ceil(params_.radius * b / std::numbers::pi * 1.2)) + 8;
  const int pa = std::max(2, static_cast<int>(std::ceil(panels * a / b)));
  const int pb = std::max(2, panels - pa);
  const GaussRule& g = gauss_legendre(16);
  auto add = [&](double lo, double hi, int np) {
    const double w = (hi - lo) / np;
    for (int k = 0; k < np; ++k)
      for (int i = 0; i < 16; ++i) {
        const double xi = lo + (k + 0.5) * w + 0.5 * w * g.nodes[i];
        const double val = fourier_profile(xi);
        if (val == 0.0) continue;
        xi_nodes_.push_back(xi);
        xi_weights_.push_back(0.5 * w * g.weights[i] * val / std::numbers::pi);
      }
  };
  add(0.0, a, pa);
  add(a, b, pb);
  tabulate(params_.stretch, params_.step, params_.radius, nodes_, weights_);
  tabulate(params_.stretch / 2.0, params_.step * 5.0, params_.radius / 4.0, coarse_nodes_, coarse_weights_);
}

std::shared_ptr<const MollifierKernel> MollifierKernel::standard() {
  static std::once_flag once;
  static std::shared_ptr<const MollifierKernel> k;
  std::call_once(once, [] { k = std::make_shared<MollifierKernel>(Params{}); });
  return k;
}

double MollifierKernel::fourier_profile(double xi) const {
  return plateau_bump(xi, params_.plateau, params_.cutoff);
}

double MollifierKernel::profile_derivative(int r, double y) const {
  double s = 0.0;
  const int m = ((r % 4) + 4) % 4;
  for (std::size_t i = 0; i < xi_nodes_.size(); ++i) {
    const double xi = xi_nodes_[i];
    const double arg = y * xi;
    double trig = 0.0;
    switch (m) {
      case 0: trig = std::cos(arg); break;
      case 1: trig = -std::sin(arg); break;
      case 2: trig = -std::cos(arg); break;
      default: trig = std::sin(arg); break;
    }
    s += xi_weights_[i] * std::pow(xi, r) * trig;
  }
  return s;
}

void MollifierKernel::tabulate(double stretch, double step, double radius, std::vector<double>& nodes,
                               std::vector<std::vector<double>>& weights) const {
  const double smax = stretch * std::asinh(radius / stretch);
  const int half = static_cast<int>(std::floor(smax / step));
  std::vector<double> base;
  for (int j = -half; j <= half; ++j) {
    const double s = j * step;
    nodes.push_back(stretch * std::sinh(s / stretch));
    base.push_back(step * std::cosh(s / stretch));
  }
  const int nn = static_cast<int>(nodes.size());
  const int rmax = params_.derivative_order;
  weights.assign(rmax + 1, std::vector<double>(nn));
  for (int j = 0; j < nn; ++j) {
    std::vector<double> acc(rmax + 1, 0.0);
    for (std::size_t i = 0; i < xi_nodes_.size(); ++i) {
      const double xi = xi_nodes_[i], arg = nodes[j] * xi;
      const double c = std::cos(arg), sn = std::sin(arg);
      double pw = xi_weights_[i];
      for (int r = 0; r <= rmax; ++r) {
        const int m = r % 4;
        acc[r] += pw * (m == 0 ? c : m == 1 ? -sn : m == 2 ? -c : sn);
        pw *= xi;
      }
    }
    for (int r = 0; r <= rmax; ++r) weights[r][j] = base[j] * acc[r];
  }
  for (int r = 0; r <= rmax; ++r) correct_moments(r, nodes, base, weights[r]);
}

void MollifierKernel::correct_moments(int r, const std::vector<double>& nodes, const std::vector<double>& base,
                                      std::vector<double>& w) const {
  // Least-change correction of the moments 0..kmax. High moments are carried
  // by the kernel tail, so the correction lands near the ends of the rule.
  const int nn = static_cast<int>(nodes.size());
  const int kmax = params_.moment_order;
  const double scale = 100.0;
  Eigen::MatrixXd at(kmax + 1, nn);
  Eigen::VectorXd resid(kmax + 1);
  Eigen::VectorXd d(nn);
  for (int j = 0; j < nn; ++j) d[j] = std::sqrt(base[j]);
  for (int k = 0; k <= kmax; ++k) {
    double target = 0.0;
    if (k == r) {
      target = (r % 2 == 0 ? 1.0 : -1.0);
      for (int i = 2; i <= r; ++i) target *= i;
      target /= std::pow(scale, k);
    }
    double acc = 0.0;
    for (int j = 0; j < nn; ++j) {
      const double v = std::pow(nodes[j] / scale, k);
      acc += w[j] * v;
      at(k, j) = v * d[j];
    }
    resid[k] = target - acc;
  }
  const Eigen::VectorXd y = at.completeOrthogonalDecomposition().solve(resid);
  for (int j = 0; j < nn; ++j) w[j] += d[j] * y[j];
}

double MollifierKernel::tail_mass(double n, double eps) const {
  // |profile| beyond the last node, bounded by its value there, over a window
  // as wide as the rule.
  const double r = params_.radius;
  const double edge = std::max(std::abs(profile(r)), std::abs(profile(-r)));
  return 2.0 * edge * r * std::pow(1.0 + eps * 2.0 * r, n);
}

double MollifierKernel::moment(int j) const {
  const auto w = weights(0);
  std::vector<double> terms(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) terms[i] = w[i] * std::pow(nodes_[i], j);
  return pairwise_sum(terms);
}

// ---------------------------------------------------------------- mollified

MollifiedField::MollifiedField(FieldPtr base, KernelPtr kernel, double eps, Backend backend)
    : CoefficientField(base->dim()), base_(std::move(base)), kernel_(std::move(kernel)), eps_(eps), backend_(backend) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("mollify: eps must lie in (0, 1]");
  if (kernel_->moment_order() < base_->k() && base_->max_order() < kUnlimitedOrder)
    throw DomainError("mollify: kernel moment order is below the field's k");
  if (backend_ == Backend::automatic)
    backend_ = (base_->dim() == 1 && base_->period()) ? Backend::fourier : Backend::quadrature;
  if (auto h = std::dynamic_pointer_cast<const HoelderField>(base_)) {
    // Polynomial growth up to the moment order is absorbed by the moment
    // correction; faster growth leaves a tail the rule cannot control.
    const GrowthBound& g = h->growth_bound();
    if (g.n0 > kernel_->moment_order()) {
      tail_bound_ = g.c0 * kernel_->tail_mass(g.n0, eps_);
      tail_zeta_ = g.zeta1;
    }
  }
  if (backend_ == Backend::fourier) {
    if (base_->dim() != 1 || !base_->period()) throw DomainError("mollify: fourier backend needs a periodic 1D field");
    const double per = *base_->period();
    kappa0_ = 2.0 * std::numbers::pi / per;
    const int kmax = static_cast<int>(std::floor(kernel_->params().cutoff / (eps_ * kappa0_)));
    int m = 1 << 16;
    while (m < 8 * (2 * kmax + 1)) m *= 2;
    std::vector<cplx> samples(m), spec;
    for (int j = 0; j < m; ++j) samples[j] = base_->eval(-0.5 * per + per * j / m);
    Eigen::FFT<double> fft;
    fft.fwd(spec, samples);
    modes_.assign(2 * kmax + 1, cplx(0.0));
    for (int q = -kmax; q <= kmax; ++q) {
      const int idx = q >= 0 ? q : m + q;
      // shift from x_0 = -per/2: multiply by e^{-i q kappa0 (-per/2)}
      const cplx phase = std::polar(1.0, q * std::numbers::pi);
      modes_[q + kmax] = spec[idx] / static_cast<double>(m) * phase * kernel_->fourier_profile(eps_ * q * kappa0_);
    }
  }
}

std::string MollifiedField::describe() const {
  std::ostringstream os;
  os << "mollified[" << base_->describe() << ", eps=" << eps_ << "]";
  return os.str();
}

double MollifiedField::fourier_deriv(int r, double x) const {
  const int kmax = static_cast<int>(modes_.size() / 2);
  const cplx step = std::polar(1.0, kappa0_ * x);
  cplx e = 1.0;
  double acc = modes_[kmax].real() * (r == 0 ? 1.0 : 0.0);
  for (int q = 1; q <= kmax; ++q) {
    e *= step;
    if (q % 64 == 0) e = std::polar(1.0, kappa0_ * q * x);
    const cplx f = std::pow(cplx(0.0, q * kappa0_), r);
    acc += 2.0 * (modes_[kmax + q] * f * e).real();
  }
  return acc;
}

double MollifiedField::quadrature_deriv(const MultiIndex& eta, Point x) const {
  const int d = dim();
  const int base_max = std::min(base_->max_order(), std::max(base_->k(), 0));
  const bool smooth_base = base_->max_order() >= kUnlimitedOrder;
  // Split eta into a part on the field (nu) and a part on the kernel.
  MultiIndex nu(d), rest(d);
  int budget = smooth_base ? eta.order() : base_max;
  for (int i = 0; i < d; ++i) {
    const int take = std::min(eta[i], budget);
    nu[i] = take;
    budget -= take;
    rest[i] = eta[i] - take;
    if (rest[i] > kernel_->derivative_order())
      throw DomainError("mollify: derivative order exceeds the tabulated kernel derivatives");
  }
  const double scale = std::pow(eps_, -rest.order());
  double xs[MultiIndex::kMaxDim];
  if (d == 1) {
    const auto nodes = kernel_->nodes();
    const auto w = kernel_->weights(rest[0]);
    std::vector<double> terms(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      xs[0] = x[0] - eps_ * nodes[j];
      terms[j] = w[j] * base_->deriv(nu, Point(xs, 1));
    }
    const double val = pairwise_sum(terms);
    if (!std::isfinite(val)) throw ConvergenceError("mollify: non-finite quadrature sum", val);
    if (tail_bound_ > 0.0) {
      const double bound = tail_bound_ * (std::abs(base_->eval(x)) + tail_zeta_);
      if (bound > 1e-9 * (1.0 + std::abs(val)))
        throw ConvergenceError("mollify: kernel tail bound exceeded at x=" + std::to_string(x[0]), bound);
    }
    return scale * val;
  }
  const auto nodes = kernel_->coarse_nodes();
  const auto w0 = kernel_->coarse_weights(rest[0]);
  const auto w1 = kernel_->coarse_weights(rest[1]);
  std::vector<double> rows(nodes.size());
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    double acc = 0.0;
    xs[0] = x[0] - eps_ * nodes[a];
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      xs[1] = x[1] - eps_ * nodes[b];
      acc += w1[b] * base_->deriv(nu, Point(xs, 2));
    }
    rows[a] = w0[a] * acc;
  }
  return scale * pairwise_sum(rows);
}

double MollifiedField::deriv(const MultiIndex& eta, Point x) const {
  if (backend_ == Backend::fourier) return fourier_deriv(eta[0], x[0]);
  return quadrature_deriv(eta, x);
}

std::shared_ptr<const MollifiedField> mollify(FieldPtr f, KernelPtr kernel, double eps) {
  return std::make_shared<MollifiedField>(std::move(f), std::move(kernel), eps);
}

std::string mollified_csv(const MollifiedField& f, double lo, double hi, int samples) {
  std::ostringstream os;
  os.precision(17);
  os << "x,f,f_eps,abs_err\n";
  for (int i = 0; i < samples; ++i) {
    const double x = samples == 1 ? lo : lo + (hi - lo) * i / (samples - 1);
    const double a = f.base()->eval(x), b = f.eval(x);
    os << x << "," << a << "," << b << "," << std::abs(a - b) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- forms

void check_form_symmetry(const Form& form) {
  for (const FormTerm& t : form) {
    if (t.alpha == t.beta) {
      if (std::abs(t.factor.imag()) > 1e-14 * std::max(1.0, std::abs(t.factor)))
        throw DomainError("form: diagonal coefficient " + t.alpha.str() + t.beta.str() + " is not real");
      continue;
    }
    bool found = false;
    for (const FormTerm& u : form)
      if (u.alpha == t.beta && u.beta == t.alpha && u.field->id() == t.field->id() &&
          std::abs(u.factor - std::conj(t.factor)) <= 1e-14 * std::max(1.0, std::abs(t.factor)))
        found = true;
    if (!found)
      throw DomainError("form: coefficient " + t.alpha.str() + t.beta.str() + " has no conjugate partner");
  }
}

int form_order(const Form& form) {
  int m = 0;
  for (const FormTerm& t : form) m = std::max({m, t.alpha.order(), t.beta.order()});
  return m;
}

PolySymbol principal_symbol(const Form& form) {
  if (form.empty()) throw DomainError("form: empty");
  PolySymbol s(form.front().alpha.dim(), 0);
  for (const FormTerm& t : form) s.add(t.alpha + t.beta, t.field, t.factor);
  return s;
}

PolySymbol framing_weight(int dim, int m) {
  PolySymbol w(dim, 0);
  for (int o = 0; o <= m; ++o) for_each_multi_index(dim, o, [&](const MultiIndex& a) { w.add_constant(a + a, 1.0); });
  return w;
}

Form mollify_form(const Form& form, double eps, KernelPtr kernel) {
  std::map<std::uint64_t, FieldPtr> cache;
  Form out;
  for (const FormTerm& t : form) {
    FieldPtr& moll = cache[t.field->id()];
    if (!moll) {
      const bool smooth = t.field->is_constant() || t.field->max_order() >= kUnlimitedOrder;
      moll = smooth ? t.field : FieldPtr(mollify(t.field, kernel, eps));
    }
    out.push_back({t.alpha, t.beta, moll, t.factor});
  }
  return out;
}

FramingSymbolPair build_framing_symbols(const Form& form, double eps, KernelPtr kernel, const FramingOptions& opt) {
  if (form.empty()) throw DomainError("build_framing_symbols: empty form");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("build_framing_symbols: eps must lie in (0, 1]");
  check_form_symmetry(form);
  const int dim = form.front().alpha.dim();
  if (dim != 1) throw DomainError("build_framing_symbols: only d = 1 forms are supported");
  FramingSymbolPair out;
  out.eps = eps;
  out.order = form_order(form);
  out.tau = 1e300;
  for (const FormTerm& t : form)
    if (!t.field->is_constant()) out.tau = std::min(out.tau, t.field->tau());
  if (out.tau == 1e300) out.tau = 1.0;

  std::vector<double> xs(opt.samples);
  for (int i = 0; i < opt.samples; ++i)
    xs[i] = opt.window_lo + (opt.window_hi - opt.window_lo) * i / std::max(1, opt.samples - 1);

  out.mollified = mollify_form(form, eps, kernel);
  double kmax = 0.0, ktop = 0.0;
  std::map<std::uint64_t, double> sups;
  for (std::size_t i = 0; i < form.size(); ++i) {
    const FormTerm& t = form[i];
    const FieldPtr& moll = out.mollified[i].field;
    if (!sups.count(t.field->id())) {
      double sup = 0.0;
      if (moll != t.field)
        for (double x : xs) sup = std::max(sup, std::abs(t.field->eval(x) - moll->eval(x)));
      sups[t.field->id()] = sup;
    }
    const double kk = std::abs(t.factor) * sups[t.field->id()] / std::pow(eps, out.tau);
    out.mollification_constants.push_back(kk);
    kmax = std::max(kmax, kk);
    if (t.alpha.order() == out.order && t.beta.order() == out.order) ktop = std::max(ktop, kk);
  }
  out.c1 = opt.c_scale * static_cast<double>(form.size()) * kmax * opt.safety;
  out.shift = out.c1 * std::pow(eps, out.tau);

  if (opt.ellipticity) {
    out.ellipticity = *opt.ellipticity;
  } else {
    double mn = 1e300;
    for (double x : xs) {
      double top = 0.0;
      for (const FormTerm& t : form)
        if (t.alpha.order() == out.order && t.beta.order() == out.order) top += (t.factor * t.field->eval(x)).real();
      mn = std::min(mn, top);
    }
    out.ellipticity = mn;
  }
  if (!(out.ellipticity > 0.0)) throw DomainError("build_framing_symbols: top-order part is not elliptic");
  const double denom = ktop + out.c1;
  out.threshold_eps = denom > 0.0 ? std::min(1.0, std::pow(out.ellipticity / (2.0 * denom), 1.0 / out.tau)) : 1.0;
  if (out.ellipticity - denom * std::pow(eps, out.tau) < 0.5 * out.ellipticity)
    throw DomainError("build_framing_symbols: eps=" + std::to_string(eps) +
                      " exceeds the ellipticity-preservation threshold " + std::to_string(out.threshold_eps));

  out.plus_form = out.mollified;
  out.minus_form = out.mollified;
  for (int o = 0; o <= out.order; ++o)
    for_each_multi_index(dim, o, [&](const MultiIndex& a) {
      out.plus_form.push_back({a, a, constant_field(out.shift, dim), 1.0});
      out.minus_form.push_back({a, a, constant_field(-out.shift, dim), 1.0});
    });
  const PolySymbol central = principal_symbol(out.mollified);
  const PolySymbol w = framing_weight(dim, out.order);
  out.plus = central + w * cplx(out.shift);
  out.minus = central - w * cplx(out.shift);
  return out;
}

}  // namespace semiweyl
