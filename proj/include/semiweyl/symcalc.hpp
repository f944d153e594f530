#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "semiweyl/coeffs.hpp"
#include "semiweyl/symbol.hpp"

namespace semiweyl {

class FunctionProfile;

// Coefficients c_0..c_N of the composition Op_t(a) Op_t(b) = sum hbar^j Op_t(c_j)
// for t in {0, 1/2, 1}. Exact for symbols polynomial in p.
std::vector<PolySymbol> moyal_terms(const PolySymbol& a, const PolySymbol& b, double t, int n);

// Composition of hbar-series truncated at order n.
SymbolSeries compose_series(const SymbolSeries& a, const SymbolSeries& b, double t, int n);

// Symbol series of the same operator in t2-quantization given its
// t1-quantization, truncated at order n.
SymbolSeries requantize(const SymbolSeries& b, double t1, double t2, int n);

// Weyl symbol of order hbar^1 of the operator defined by a form.
PolySymbol subprincipal_from_form(const Form& form);

// Full Weyl symbol series of sum (hD)^a a_{ab} (hD)^b (exact, finite).
SymbolSeries weyl_symbol_of_form(const Form& form);

// ------------------------------------------------------------ expressions

// Atom of a symbolic expression:
//   coef:      d_x^eta d_p^gamma a_j
//   resolvent: B = (a_0 - z)^{-1}
//   outer:     f^{(k)}(g) for the function attached to the expression
struct SymAtom {
  enum class Kind { coef, resolvent, outer };
  Kind kind = Kind::coef;
  int index = 0;  // j for coef, k for outer
  MultiIndex eta;
  MultiIndex gamma;

  static SymAtom coef(int j, const MultiIndex& eta, const MultiIndex& gamma) {
    return {Kind::coef, j, eta, gamma};
  }
  static SymAtom resolvent(int dim) { return {Kind::resolvent, 0, MultiIndex(dim), MultiIndex(dim)}; }
  static SymAtom outer(int k, int dim) { return {Kind::outer, k, MultiIndex(dim), MultiIndex(dim)}; }

  bool operator<(const SymAtom& o) const;
  bool operator==(const SymAtom& o) const;
  std::string str() const;
};

using SymbolExpr = Poly<SymAtom>;

SymbolExpr coef_atom(int j, int dim);

// Information about the base symbols that lets derivatives drop atoms that
// vanish identically. The default assumes nothing; a context built from a
// series treats indices past its end as zero.
struct SymbolicContext {
  int dim = 1;
  std::vector<bool> zero;
  std::vector<bool> x_independent;
  std::vector<int> p_degree;
  // Expression g inside outer atoms f^{(k)}(g); defaults to a_0.
  std::optional<SymbolExpr> outer_inner;

  static SymbolicContext generic(int dim);
  static SymbolicContext from_series(const SymbolSeries& base);
  bool vanishes(int j, const MultiIndex& eta, const MultiIndex& gamma) const;
};

SymbolExpr expr_d_x(const SymbolExpr& e, int i, const SymbolicContext& ctx);
SymbolExpr expr_d_p(const SymbolExpr& e, int i, const SymbolicContext& ctx);
SymbolExpr expr_derivative(const SymbolExpr& e, const MultiIndex& eta, const MultiIndex& gamma,
                           const SymbolicContext& ctx);

// d_p^beta d_x^alpha f^{(f_order)}(g), expanded into outer atoms f^{(k)}(g)
// times polynomials in derivatives of the atoms of g.
SymbolExpr faa_di_bruno_expand(int f_order, const SymbolExpr& g, const MultiIndex& alpha,
                               const MultiIndex& beta);

// Largest value of (j + |eta| - tau)_+ over coefficient atoms: the power of
// eps^{-1} by which the expression can blow up for coefficients of
// regularity tau.
double regularity_deficit(const SymbolExpr& e, double tau);

// Sum of |eta| (resp. |gamma|) over the coefficient atoms of a monomial.
int monomial_x_order(const SymbolExpr::Monomial& m);
int monomial_p_order(const SymbolExpr::Monomial& m);

// Numerical evaluation of expressions over a base series.
class SymbolEvaluator {
 public:
  explicit SymbolEvaluator(SymbolSeries base);

  // Precomputes derivative symbols for every atom of e. Throws DomainError
  // naming an atom that needs more smoothness than a field provides.
  void prepare(const SymbolExpr& e);

  struct Inputs {
    cplx z{0.0, 0.0};
    const FunctionProfile* f = nullptr;
  };
  cplx eval(const SymbolExpr& e, Point x, Point p, const Inputs& in) const;
  cplx eval(const SymbolExpr& e, double x, double p, const Inputs& in) const;

  // Flattened form of a prepared expression for repeated evaluation.
  struct Compiled {
    struct Term {
      cplx c;
      std::vector<std::pair<int, int>> factors;  // (slot, power); slot -1 is B, slot <= -2 is f^{(-2 - slot)}
    };
    std::vector<Term> terms;
    int max_outer = 0;
  };
  // Coefficients of every prepared symbol at a fixed x.
  struct Frozen {
    std::vector<std::vector<std::pair<MultiIndex, cplx>>> polys;
    std::vector<std::pair<MultiIndex, cplx>> a0;
  };
  Compiled compile(const SymbolExpr& e) const;
  Frozen freeze(Point x) const;
  cplx eval(const Compiled& e, const Frozen& fx, Point p, const Inputs& in) const;

  const SymbolSeries& base() const { return base_; }

 private:
  struct Key {
    int j;
    MultiIndex eta, gamma;
    bool operator<(const Key& o) const;
  };
  SymbolSeries base_;
  std::map<Key, PolySymbol> cache_;
  std::map<Key, int> slots_;
  std::vector<const PolySymbol*> slot_symbols_;
  int max_outer_ = 0;
};

}  // namespace semiweyl
