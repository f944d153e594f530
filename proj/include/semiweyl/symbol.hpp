#pragma once

#include <map>
#include <string>
#include <vector>

#include "semiweyl/field.hpp"
#include "semiweyl/poly.hpp"

namespace semiweyl {

// Derivative d_x^eta of a coefficient field.
struct FieldAtom {
  FieldPtr field;
  MultiIndex eta;

  bool operator<(const FieldAtom& o) const {
    if (field->id() != o.field->id()) return field->id() < o.field->id();
    return eta < o.eta;
  }
  bool operator==(const FieldAtom& o) const { return field->id() == o.field->id() && eta == o.eta; }
  std::string str() const;
  // Throws DomainError if the field has no derivative of this order.
  double value(Point x) const;
};

using CoeffPoly = Poly<FieldAtom>;

CoeffPoly coeff(FieldPtr f, cplx factor = 1.0);
CoeffPoly derive_x(const CoeffPoly& c, int j);
CoeffPoly derive_x(const CoeffPoly& c, const MultiIndex& eta);
cplx eval_coeff(const CoeffPoly& c, Point x);
// Largest derivative order of any atom relative to what the field supports;
// throws DomainError naming the first atom that exceeds it.
void check_smoothness(const CoeffPoly& c);
bool coeff_periodic_with(const CoeffPoly& c, double period);

// Symbol sum_alpha c_alpha(x) p^alpha, polynomial in p.
class PolySymbol {
 public:
  using Terms = std::map<MultiIndex, CoeffPoly>;

  explicit PolySymbol(int dim = 1, int hbar_order = 0) : dim_(dim), hbar_order_(hbar_order) {}

  int dim() const { return dim_; }
  int hbar_order() const { return hbar_order_; }
  void set_hbar_order(int j) { hbar_order_ = j; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Largest |alpha| present (0 for the zero symbol).
  int order() const;
  bool x_independent() const;

  PolySymbol& add(const MultiIndex& alpha, const CoeffPoly& c);
  PolySymbol& add(const MultiIndex& alpha, FieldPtr f, cplx factor = 1.0);
  PolySymbol& add_constant(const MultiIndex& alpha, cplx c);
  const CoeffPoly& coefficient(const MultiIndex& alpha) const;

  PolySymbol d_p(int j) const;
  PolySymbol d_x(int j) const;
  // d_x^eta d_p^gamma.
  PolySymbol derivative(const MultiIndex& eta, const MultiIndex& gamma) const;

  cplx eval(Point x, Point p) const;
  cplx eval(double x, double p) const;

  PolySymbol& operator+=(const PolySymbol& o);
  PolySymbol& operator-=(const PolySymbol& o);
  PolySymbol& operator*=(cplx s);
  friend PolySymbol operator+(PolySymbol a, const PolySymbol& b) { return a += b; }
  friend PolySymbol operator-(PolySymbol a, const PolySymbol& b) { return a -= b; }
  friend PolySymbol operator*(PolySymbol a, cplx s) { return a *= s; }
  friend PolySymbol operator*(cplx s, PolySymbol a) { return a *= s; }
  // Pointwise product.
  friend PolySymbol operator*(const PolySymbol& a, const PolySymbol& b);

  bool operator==(const PolySymbol& o) const { return terms_ == o.terms_; }
  bool approx_equal(const PolySymbol& o, double abs_tol) const;
  void check_smoothness() const;
  std::string str() const;

 private:
  int dim_;
  int hbar_order_;
  Terms terms_;
};

// p^alpha as a symbol.
PolySymbol monomial_symbol(const MultiIndex& alpha, cplx c = 1.0);
// c(x) p^alpha.
PolySymbol field_symbol(FieldPtr f, const MultiIndex& alpha, cplx c = 1.0);

// An hbar-series sum_j hbar^j s[j].
using SymbolSeries = std::vector<PolySymbol>;

}  // namespace semiweyl
