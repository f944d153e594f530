#include "semiweyl/symcalc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semiweyl/function_profile.hpp"

namespace semiweyl {

namespace {

const cplx kI(0.0, 1.0);

cplx ipow(cplx base, int n) {
  cplx r = 1.0;
  for (int k = 0; k < n; ++k) r *= base;
  return r;
}

// Removes coefficients that are roundoff relative to the largest one.
PolySymbol pruned(const PolySymbol& s, double rel_tol = 1e-13) {
  double mx = 0.0;
  for (const auto& [a, c] : s.terms())
    for (const auto& [m, v] : c.terms()) mx = std::max(mx, std::abs(v));
  PolySymbol r(s.dim(), s.hbar_order());
  for (const auto& [a, c] : s.terms()) {
    CoeffPoly kept;
    for (const auto& [m, v] : c.terms())
      if (std::abs(v) > rel_tol * mx) kept.add_term(m, v);
    r.add(a, kept);
  }
  return r;
}

PolySymbol moyal_term(const PolySymbol& a, const PolySymbol& b, double t, int j) {
  const int d = a.dim();
  PolySymbol out(d, a.hbar_order() + b.hbar_order() + j);
  if (a.is_zero() || b.is_zero()) return out;
  const cplx dpow = ipow(-kI, j);
  for (int ja = 0; ja <= j; ++ja) {
    const double wa = std::pow(1.0 - t, ja);
    const double wb = std::pow(-t, j - ja);
    if (wa == 0.0 || wb == 0.0) continue;
    for_each_multi_index(d, ja, [&](const MultiIndex& alpha) {
      for_each_multi_index(d, j - ja, [&](const MultiIndex& beta) {
        if (alpha.order() > a.order() || beta.order() > b.order()) return;
        PolySymbol left = a.derivative(beta, alpha);
        if (left.is_zero()) return;
        PolySymbol right = b.derivative(alpha, beta);
        if (right.is_zero()) return;
        const cplx w = dpow * wa * wb / (alpha.factorial() * beta.factorial());
        out += (left * right) * w;
      });
    });
  }
  out = pruned(out);
  out.set_hbar_order(a.hbar_order() + b.hbar_order() + j);
  return out;
}

void check_t(double t) {
  if (t != 0.0 && t != 0.5 && t != 1.0) throw DomainError("quantization parameter t must be 0, 1/2 or 1");
}

}  // namespace

std::vector<PolySymbol> moyal_terms(const PolySymbol& a, const PolySymbol& b, double t, int n) {
  check_t(t);
  if (n < 0) throw DomainError("moyal_terms: negative order");
  if (a.dim() != b.dim()) throw DomainError("moyal_terms: dimension mismatch");
  std::vector<PolySymbol> out;
  for (int j = 0; j <= n; ++j) {
    PolySymbol c = moyal_term(a, b, t, j);
    c.set_hbar_order(j);
    out.push_back(std::move(c));
  }
  return out;
}

SymbolSeries compose_series(const SymbolSeries& a, const SymbolSeries& b, double t, int n) {
  check_t(t);
  if (a.empty() || b.empty()) throw DomainError("compose_series: empty series");
  const int d = a.front().dim();
  SymbolSeries out;
  for (int order = 0; order <= n; ++order) {
    PolySymbol c(d, order);
    for (int ia = 0; ia < static_cast<int>(a.size()) && ia <= order; ++ia)
      for (int ib = 0; ib < static_cast<int>(b.size()) && ia + ib <= order; ++ib)
        c += moyal_term(a[ia], b[ib], t, order - ia - ib);
    c = pruned(c);
    c.set_hbar_order(order);
    out.push_back(std::move(c));
  }
  return out;
}

SymbolSeries requantize(const SymbolSeries& b, double t1, double t2, int n) {
  if (b.empty()) throw DomainError("requantize: empty series");
  const int d = b.front().dim();
  SymbolSeries out;
  for (int order = 0; order <= n; ++order) {
    PolySymbol c(d, order);
    for (int j = 0; j <= order; ++j) {
      const int src = order - j;
      if (src >= static_cast<int>(b.size())) continue;
      // ((t1 - t2)^j / j!) (grad_x . D_p)^j = (t1 - t2)^j sum_{|g|=j} (-i)^j d_x^g d_p^g / g!
      const cplx w0 = std::pow(t1 - t2, j) * ipow(-kI, j);
      if (w0 == cplx(0.0)) continue;
      for_each_multi_index(d, j, [&](const MultiIndex& g) {
        PolySymbol term = b[src].derivative(g, g);
        if (term.is_zero()) return;
        term.check_smoothness();
        c += term * (w0 / g.factorial());
      });
    }
    c = pruned(c);
    c.set_hbar_order(order);
    out.push_back(std::move(c));
  }
  return out;
}

PolySymbol subprincipal_from_form(const Form& form) {
  if (form.empty()) throw DomainError("subprincipal_from_form: empty form");
  const int d = form.front().alpha.dim();
  PolySymbol a1(d, 1);
  for (const FormTerm& t : form) {
    for (int j = 0; j < d; ++j) {
      const int w = t.beta[j] - t.alpha[j];
      if (w == 0) continue;
      const MultiIndex ej = MultiIndex::unit(d, j);
      const MultiIndex ab = t.alpha + t.beta;
      if (ab[j] == 0) continue;
      a1.add(ab - ej, derive_x(coeff(t.field, t.factor), j) * (kI * (0.5 * w)));
    }
  }
  a1 = pruned(a1);
  a1.set_hbar_order(1);
  return a1;
}

SymbolSeries weyl_symbol_of_form(const Form& form) {
  if (form.empty()) throw DomainError("weyl_symbol_of_form: empty form");
  const int d = form.front().alpha.dim();
  const int n = 2 * form_order(form);
  SymbolSeries out(n + 1, PolySymbol(d));
  for (const FormTerm& t : form) {
    const SymbolSeries left{monomial_symbol(t.alpha)};
    const SymbolSeries mid{field_symbol(t.field, MultiIndex(d), t.factor)};
    const SymbolSeries right{monomial_symbol(t.beta)};
    const SymbolSeries s = compose_series(compose_series(left, mid, 0.5, n), right, 0.5, n);
    for (int j = 0; j <= n; ++j) out[j] += s[j];
  }
  for (int j = 0; j <= n; ++j) {
    out[j] = pruned(out[j]);
    out[j].set_hbar_order(j);
  }
  while (out.size() > 1 && out.back().is_zero()) out.pop_back();
  return out;
}

// ------------------------------------------------------------ expressions

bool SymAtom::operator<(const SymAtom& o) const {
  if (kind != o.kind) return kind < o.kind;
  if (index != o.index) return index < o.index;
  if (eta != o.eta) return eta < o.eta;
  return gamma < o.gamma;
}

bool SymAtom::operator==(const SymAtom& o) const {
  return kind == o.kind && index == o.index && eta == o.eta && gamma == o.gamma;
}

std::string SymAtom::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::resolvent:
      return "B";
    case Kind::outer:
      os << "f" << index;
      return os.str();
    case Kind::coef:
      os << "a" << index;
      if (!eta.is_zero()) os << "_x" << eta.str();
      if (!gamma.is_zero()) os << "_p" << gamma.str();
      return os.str();
  }
  return "?";
}

SymbolExpr coef_atom(int j, int dim) { return SymbolExpr::atom(SymAtom::coef(j, MultiIndex(dim), MultiIndex(dim))); }

SymbolicContext SymbolicContext::generic(int dim) {
  SymbolicContext c;
  c.dim = dim;
  return c;
}

SymbolicContext SymbolicContext::from_series(const SymbolSeries& base) {
  if (base.empty()) throw DomainError("SymbolicContext: empty series");
  SymbolicContext c;
  c.dim = base.front().dim();
  for (const PolySymbol& s : base) {
    c.zero.push_back(s.is_zero());
    c.x_independent.push_back(s.x_independent());
    c.p_degree.push_back(s.order());
  }
  return c;
}

bool SymbolicContext::vanishes(int j, const MultiIndex& eta, const MultiIndex& gamma) const {
  const auto n = static_cast<std::size_t>(j);
  if (!zero.empty() && n >= zero.size()) return true;
  if (n < zero.size() && zero[n]) return true;
  if (n < x_independent.size() && x_independent[n] && !eta.is_zero()) return true;
  if (n < p_degree.size() && gamma.order() > p_degree[n]) return true;
  return false;
}

namespace {

SymbolExpr derive_expr(const SymbolExpr& e, const MultiIndex& step_x, const MultiIndex& step_p,
                       const SymbolicContext& ctx) {
  const int d = ctx.dim;
  const SymbolExpr inner = ctx.outer_inner ? *ctx.outer_inner : coef_atom(0, d);
  return e.derive([&](const SymAtom& a) -> SymbolExpr {
    switch (a.kind) {
      case SymAtom::Kind::coef: {
        const MultiIndex eta = a.eta + step_x, gamma = a.gamma + step_p;
        if (ctx.vanishes(a.index, eta, gamma)) return {};
        return SymbolExpr::atom(SymAtom::coef(a.index, eta, gamma));
      }
      case SymAtom::Kind::resolvent: {
        // d B = -B^2 d a_0
        if (ctx.vanishes(0, step_x, step_p)) return {};
        return SymbolExpr::atom(SymAtom::resolvent(d), 2, -1.0) *
               SymbolExpr::atom(SymAtom::coef(0, step_x, step_p));
      }
      case SymAtom::Kind::outer: {
        const SymbolExpr dg = derive_expr(inner, step_x, step_p, ctx);
        if (dg.is_zero()) return {};
        return SymbolExpr::atom(SymAtom::outer(a.index + 1, d)) * dg;
      }
    }
    return {};
  });
}

}  // namespace

SymbolExpr expr_d_x(const SymbolExpr& e, int i, const SymbolicContext& ctx) {
  return derive_expr(e, MultiIndex::unit(ctx.dim, i), MultiIndex(ctx.dim), ctx);
}

SymbolExpr expr_d_p(const SymbolExpr& e, int i, const SymbolicContext& ctx) {
  return derive_expr(e, MultiIndex(ctx.dim), MultiIndex::unit(ctx.dim, i), ctx);
}

SymbolExpr expr_derivative(const SymbolExpr& e, const MultiIndex& eta, const MultiIndex& gamma,
                           const SymbolicContext& ctx) {
  SymbolExpr r = e;
  for (int i = 0; i < ctx.dim && !r.is_zero(); ++i)
    for (int k = 0; k < gamma[i] && !r.is_zero(); ++k) r = expr_d_p(r, i, ctx);
  for (int i = 0; i < ctx.dim && !r.is_zero(); ++i)
    for (int k = 0; k < eta[i] && !r.is_zero(); ++k) r = expr_d_x(r, i, ctx);
  return r;
}

SymbolExpr faa_di_bruno_expand(int f_order, const SymbolExpr& g, const MultiIndex& alpha, const MultiIndex& beta) {
  if (alpha.order() + beta.order() < 1) throw DomainError("faa_di_bruno_expand: derivative order must be >= 1");
  SymbolicContext ctx = SymbolicContext::generic(alpha.dim());
  ctx.outer_inner = g;
  return expr_derivative(SymbolExpr::atom(SymAtom::outer(f_order, alpha.dim())), alpha, beta, ctx);
}

double regularity_deficit(const SymbolExpr& e, double tau) {
  double worst = 0.0;
  e.for_each_atom([&](const SymAtom& a) {
    if (a.kind == SymAtom::Kind::coef) worst = std::max(worst, a.index + a.eta.order() - tau);
  });
  return worst;
}

int monomial_x_order(const SymbolExpr::Monomial& m) {
  int s = 0;
  for (const auto& [a, e] : m)
    if (a.kind == SymAtom::Kind::coef) s += e * a.eta.order();
  return s;
}

int monomial_p_order(const SymbolExpr::Monomial& m) {
  int s = 0;
  for (const auto& [a, e] : m)
    if (a.kind == SymAtom::Kind::coef) s += e * a.gamma.order();
  return s;
}

// ------------------------------------------------------------ evaluator

bool SymbolEvaluator::Key::operator<(const Key& o) const {
  if (j != o.j) return j < o.j;
  if (eta != o.eta) return eta < o.eta;
  return gamma < o.gamma;
}

SymbolEvaluator::SymbolEvaluator(SymbolSeries base) : base_(std::move(base)) {
  if (base_.empty()) throw DomainError("SymbolEvaluator: empty base series");
}

void SymbolEvaluator::prepare(const SymbolExpr& e) {
  e.for_each_atom([&](const SymAtom& a) {
    if (a.kind == SymAtom::Kind::outer) {
      max_outer_ = std::max(max_outer_, a.index);
      return;
    }
    if (a.kind != SymAtom::Kind::coef) return;
    Key key{a.index, a.eta, a.gamma};
    if (cache_.count(key)) return;
    PolySymbol s(base_.front().dim());
    if (a.index < static_cast<int>(base_.size())) s = base_[a.index].derivative(a.eta, a.gamma);
    try {
      s.check_smoothness();
    } catch (const DomainError& err) {
      throw DomainError("atom " + a.str() + ": " + err.what());
    }
    auto it = cache_.emplace(key, std::move(s)).first;
    slots_.emplace(key, static_cast<int>(slot_symbols_.size()));
    slot_symbols_.push_back(&it->second);
  });
}

SymbolEvaluator::Compiled SymbolEvaluator::compile(const SymbolExpr& e) const {
  Compiled out;
  for (const auto& [m, c] : e.terms()) {
    Compiled::Term t{c, {}};
    for (const auto& [a, pw] : m) {
      switch (a.kind) {
        case SymAtom::Kind::resolvent:
          t.factors.emplace_back(-1, pw);
          break;
        case SymAtom::Kind::outer:
          t.factors.emplace_back(-2 - a.index, pw);
          out.max_outer = std::max(out.max_outer, a.index);
          break;
        case SymAtom::Kind::coef: {
          auto it = slots_.find(Key{a.index, a.eta, a.gamma});
          if (it == slots_.end()) throw DomainError("SymbolEvaluator: atom " + a.str() + " was not prepared");
          t.factors.emplace_back(it->second, pw);
          break;
        }
      }
    }
    out.terms.push_back(std::move(t));
  }
  return out;
}

namespace {

std::vector<std::pair<MultiIndex, cplx>> freeze_symbol(const PolySymbol& s, Point x) {
  std::vector<std::pair<MultiIndex, cplx>> r;
  for (const auto& [a, c] : s.terms()) r.emplace_back(a, eval_coeff(c, x));
  return r;
}

cplx eval_frozen(const std::vector<std::pair<MultiIndex, cplx>>& poly, Point p) {
  cplx s = 0.0;
  for (const auto& [a, c] : poly) {
    double mono = 1.0;
    for (int i = 0; i < a.dim(); ++i)
      for (int k = 0; k < a[i]; ++k) mono *= p[i];
    s += c * mono;
  }
  return s;
}

}  // namespace

SymbolEvaluator::Frozen SymbolEvaluator::freeze(Point x) const {
  Frozen f;
  f.a0 = freeze_symbol(base_.front(), x);
  for (const PolySymbol* s : slot_symbols_) f.polys.push_back(freeze_symbol(*s, x));
  return f;
}

cplx SymbolEvaluator::eval(const Compiled& e, const Frozen& fx, Point p, const Inputs& in) const {
  const cplx a0 = eval_frozen(fx.a0, p);
  std::vector<cplx> slot(fx.polys.size());
  std::vector<bool> have(fx.polys.size(), false);
  std::vector<double> fd;
  if (in.f) fd = in.f->derivs(e.max_outer, a0.real());
  const cplx b = 1.0 / (a0 - in.z);
  cplx sum = 0.0;
  for (const auto& t : e.terms) {
    cplx v = t.c;
    for (const auto& [s, pw] : t.factors) {
      cplx base;
      if (s == -1) {
        base = b;
      } else if (s <= -2) {
        if (!in.f) throw DomainError("SymbolEvaluator: expression needs a function profile");
        base = fd[-2 - s];
      } else {
        if (!have[s]) {
          slot[s] = eval_frozen(fx.polys[s], p);
          have[s] = true;
        }
        base = slot[s];
      }
      for (int k = 0; k < pw; ++k) v *= base;
    }
    sum += v;
  }
  return sum;
}

cplx SymbolEvaluator::eval(const SymbolExpr& e, Point x, Point p, const Inputs& in) const {
  const cplx a0 = base_.front().eval(x, p);
  std::vector<double> fd;
  if (in.f) fd = in.f->derivs(max_outer_, a0.real());
  return e.evaluate([&](const SymAtom& a) -> cplx {
    switch (a.kind) {
      case SymAtom::Kind::resolvent:
        return 1.0 / (a0 - in.z);
      case SymAtom::Kind::outer:
        if (!in.f) throw DomainError("SymbolEvaluator: expression needs a function profile");
        return fd.at(a.index);
      case SymAtom::Kind::coef: {
        auto it = cache_.find(Key{a.index, a.eta, a.gamma});
        if (it == cache_.end()) throw DomainError("SymbolEvaluator: atom " + a.str() + " was not prepared");
        return it->second.eval(x, p);
      }
    }
    return 0.0;
  });
}

cplx SymbolEvaluator::eval(const SymbolExpr& e, double x, double p, const Inputs& in) const {
  return eval(e, Point(&x, 1), Point(&p, 1), in);
}

}  // namespace semiweyl
