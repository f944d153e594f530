#include "semiweyl/symbol.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "semiweyl/errors.hpp"

namespace semiweyl {

std::string format_coefficient(cplx c) {
  char buf[96];
  if (c.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "(%.15g)", c.real());
  } else if (c.real() == 0.0) {
    std::snprintf(buf, sizeof buf, "(%.15gi)", c.imag());
  } else {
    std::snprintf(buf, sizeof buf, "(%.15g%+.15gi)", c.real(), c.imag());
  }
  return buf;
}

std::string FieldAtom::str() const {
  std::ostringstream os;
  os << "c" << field->id();
  if (!eta.is_zero()) os << "_x" << eta.str();
  return os.str();
}

double FieldAtom::value(Point x) const {
  if (eta.order() > field->max_order())
    throw DomainError("atom " + str() + " (" + field->describe() + ") needs " + std::to_string(eta.order()) +
                      " derivatives but the field provides " + std::to_string(field->max_order()));
  return field->deriv(eta, x);
}

CoeffPoly coeff(FieldPtr f, cplx factor) {
  const int d = f->dim();
  if (f->is_constant()) {
    const double xs[MultiIndex::kMaxDim] = {0.0, 0.0, 0.0, 0.0};
    return CoeffPoly::constant(factor * f->eval(Point(xs, d)));
  }
  return CoeffPoly::atom(FieldAtom{std::move(f), MultiIndex(d)}, 1, factor);
}

CoeffPoly derive_x(const CoeffPoly& c, int j) {
  return c.derive([j](const FieldAtom& a) {
    if (a.field->is_constant()) return CoeffPoly();
    return CoeffPoly::atom(FieldAtom{a.field, a.eta + MultiIndex::unit(a.eta.dim(), j)});
  });
}

CoeffPoly derive_x(const CoeffPoly& c, const MultiIndex& eta) {
  CoeffPoly r = c;
  for (int i = 0; i < eta.dim(); ++i)
    for (int k = 0; k < eta[i]; ++k) r = derive_x(r, i);
  return r;
}

cplx eval_coeff(const CoeffPoly& c, Point x) {
  return c.evaluate([&](const FieldAtom& a) { return cplx(a.value(x)); });
}

void check_smoothness(const CoeffPoly& c) {
  c.for_each_atom([](const FieldAtom& a) {
    if (a.eta.order() > a.field->max_order())
      throw DomainError("atom " + a.str() + " (" + a.field->describe() + ") needs " + std::to_string(a.eta.order()) +
                        " derivatives but the field provides " + std::to_string(a.field->max_order()));
  });
}

bool coeff_periodic_with(const CoeffPoly& c, double period) {
  bool ok = true;
  c.for_each_atom([&](const FieldAtom& a) { ok = ok && a.field->periodic_with(period); });
  return ok;
}

// ---------------------------------------------------------------- PolySymbol

int PolySymbol::order() const {
  int m = 0;
  for (const auto& [a, c] : terms_) m = std::max(m, a.order());
  return m;
}

bool PolySymbol::x_independent() const {
  for (const auto& [a, c] : terms_)
    if (!c.is_constant()) return false;
  return true;
}

PolySymbol& PolySymbol::add(const MultiIndex& alpha, const CoeffPoly& c) {
  if (alpha.dim() != dim_) throw DomainError("PolySymbol: multi-index dimension mismatch");
  if (c.is_zero()) return *this;
  auto it = terms_.find(alpha);
  if (it == terms_.end()) {
    terms_.emplace(alpha, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
  return *this;
}

PolySymbol& PolySymbol::add(const MultiIndex& alpha, FieldPtr f, cplx factor) {
  if (f->dim() != dim_) throw DomainError("PolySymbol: field dimension mismatch");
  if (f->is_constant()) {
    const double xs[MultiIndex::kMaxDim] = {0.0, 0.0, 0.0, 0.0};
    return add_constant(alpha, factor * f->eval(Point(xs, dim_)));
  }
  return add(alpha, CoeffPoly::atom(FieldAtom{std::move(f), MultiIndex(dim_)}, 1, factor));
}

PolySymbol& PolySymbol::add_constant(const MultiIndex& alpha, cplx c) { return add(alpha, CoeffPoly::constant(c)); }

const CoeffPoly& PolySymbol::coefficient(const MultiIndex& alpha) const {
  static const CoeffPoly zero;
  auto it = terms_.find(alpha);
  return it == terms_.end() ? zero : it->second;
}

PolySymbol PolySymbol::d_p(int j) const {
  PolySymbol r(dim_, hbar_order_);
  for (const auto& [a, c] : terms_) {
    if (a[j] == 0) continue;
    MultiIndex b = a;
    b[j] -= 1;
    r.add(b, c * cplx(static_cast<double>(a[j])));
  }
  return r;
}

PolySymbol PolySymbol::d_x(int j) const {
  PolySymbol r(dim_, hbar_order_);
  for (const auto& [a, c] : terms_) r.add(a, derive_x(c, j));
  return r;
}

PolySymbol PolySymbol::derivative(const MultiIndex& eta, const MultiIndex& gamma) const {
  PolySymbol r = *this;
  for (int i = 0; i < dim_; ++i)
    for (int k = 0; k < gamma[i]; ++k) r = r.d_p(i);
  for (int i = 0; i < dim_; ++i)
    for (int k = 0; k < eta[i]; ++k) r = r.d_x(i);
  return r;
}

cplx PolySymbol::eval(Point x, Point p) const {
  cplx s = 0.0;
  for (const auto& [a, c] : terms_) {
    double mono = 1.0;
    for (int i = 0; i < dim_; ++i)
      for (int k = 0; k < a[i]; ++k) mono *= p[i];
    if (mono == 0.0) continue;
    s += eval_coeff(c, x) * mono;
  }
  return s;
}

cplx PolySymbol::eval(double x, double p) const {
  const double xs[1] = {x}, ps[1] = {p};
  return eval(Point(xs, 1), Point(ps, 1));
}

PolySymbol& PolySymbol::operator+=(const PolySymbol& o) {
  for (const auto& [a, c] : o.terms_) add(a, c);
  return *this;
}

PolySymbol& PolySymbol::operator-=(const PolySymbol& o) {
  for (const auto& [a, c] : o.terms_) add(a, c * cplx(-1.0));
  return *this;
}

PolySymbol& PolySymbol::operator*=(cplx s) {
  if (s == cplx(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [a, c] : terms_) c *= s;
  return *this;
}

PolySymbol operator*(const PolySymbol& a, const PolySymbol& b) {
  PolySymbol r(a.dim(), a.hbar_order() + b.hbar_order());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) r.add(ma + mb, ca * cb);
  return r;
}

bool PolySymbol::approx_equal(const PolySymbol& o, double abs_tol) const {
  PolySymbol d = *this - o;
  for (const auto& [a, c] : d.terms_)
    if (!c.approx_equal(CoeffPoly(), abs_tol)) return false;
  return true;
}

void PolySymbol::check_smoothness() const {
  for (const auto& [a, c] : terms_) semiweyl::check_smoothness(c);
}

std::string PolySymbol::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "[" << c.str() << "]";
    if (!a.is_zero()) os << "*p^" << a.str();
  }
  return os.str();
}

PolySymbol monomial_symbol(const MultiIndex& alpha, cplx c) {
  PolySymbol s(alpha.dim(), 0);
  s.add_constant(alpha, c);
  return s;
}

PolySymbol field_symbol(FieldPtr f, const MultiIndex& alpha, cplx c) {
  PolySymbol s(alpha.dim(), 0);
  s.add(alpha, std::move(f), c);
  return s;
}

}  // namespace semiweyl
