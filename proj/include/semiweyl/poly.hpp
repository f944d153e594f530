#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "semiweyl/numerics.hpp"

namespace semiweyl {

std::string format_coefficient(cplx c);

// Polynomial with complex coefficients in commuting atoms. Atom must be
// totally ordered and provide str(). Monomials are kept sorted by atom so
// that equal polynomials have equal term maps.
template <class Atom>
class Poly {
 public:
  using Factor = std::pair<Atom, int>;
  using Monomial = std::vector<Factor>;
  using Terms = std::map<Monomial, cplx>;

  Poly() = default;
  static Poly constant(cplx c) {
    Poly p;
    if (c != cplx(0.0)) p.terms_[{}] = c;
    return p;
  }
  static Poly atom(const Atom& a, int power = 1, cplx c = 1.0) {
    Poly p;
    if (c != cplx(0.0)) p.terms_[{{a, power}}] = c;
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
  cplx constant_term() const {
    auto it = terms_.find({});
    return it == terms_.end() ? cplx(0.0) : it->second;
  }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Monomial& m, cplx c) {
    if (c == cplx(0.0)) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == cplx(0.0)) terms_.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Poly& operator*=(cplx s) {
    if (s == cplx(0.0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= cplx(-1.0); }
  friend Poly operator*(Poly a, cplx s) { return a *= s; }
  friend Poly operator*(cplx s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(multiply(ma, mb), ca * cb);
    return r;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  static Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.reserve(a.size() + b.size());
    auto i = a.begin(), j = b.begin();
    while (i != a.end() || j != b.end()) {
      if (j == b.end() || (i != a.end() && i->first < j->first)) {
        r.push_back(*i++);
      } else if (i == a.end() || j->first < i->first) {
        r.push_back(*j++);
      } else {
        r.emplace_back(i->first, i->second + j->second);
        ++i;
        ++j;
      }
    }
    return r;
  }

  // Applies a derivation defined on atoms by rule(atom) -> Poly.
  template <class Rule>
  Poly derive(Rule&& rule) const {
    Poly r;
    for (const auto& [m, c] : terms_) {
      for (std::size_t k = 0; k < m.size(); ++k) {
        Poly da = rule(m[k].first);
        if (da.is_zero()) continue;
        Monomial rest = m;
        if (--rest[k].second == 0) rest.erase(rest.begin() + k);
        Poly part;
        part.terms_[rest] = c * static_cast<double>(m[k].second);
        r += part * da;
      }
    }
    return r;
  }

  // Replaces every atom by fn(atom) -> Poly.
  template <class Fn>
  Poly substitute(Fn&& fn) const {
    Poly r;
    for (const auto& [m, c] : terms_) {
      Poly t = constant(c);
      for (const auto& [a, e] : m) {
        Poly v = fn(a);
        for (int k = 0; k < e; ++k) t = t * v;
      }
      r += t;
    }
    return r;
  }

  // Evaluates with atom values value(atom) -> cplx.
  template <class Fn>
  cplx evaluate(Fn&& value) const {
    cplx s = 0.0;
    for (const auto& [m, c] : terms_) {
      cplx t = c;
      for (const auto& [a, e] : m) {
        const cplx v = value(a);
        for (int k = 0; k < e; ++k) t *= v;
      }
      s += t;
    }
    return s;
  }

  // Drops terms whose coefficient is below rel_tol times the largest one.
  Poly& prune(double rel_tol) {
    double mx = 0.0;
    for (const auto& [m, c] : terms_) mx = std::max(mx, std::abs(c));
    for (auto it = terms_.begin(); it != terms_.end();)
      it = std::abs(it->second) <= rel_tol * mx ? terms_.erase(it) : std::next(it);
    return *this;
  }

  bool operator==(const Poly& o) const { return terms_ == o.terms_; }

  // Same monomials with coefficients agreeing to abs_tol.
  bool approx_equal(const Poly& o, double abs_tol) const {
    Poly d = *this - o;
    for (const auto& [m, c] : d.terms_)
      if (std::abs(c) > abs_tol) return false;
    return true;
  }

  template <class Fn>
  void for_each_atom(Fn&& fn) const {
    for (const auto& [m, c] : terms_)
      for (const auto& [a, e] : m) fn(a);
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << format_coefficient(c);
      for (const auto& [a, e] : m) {
        os << "*" << a.str();
        if (e != 1) os << "^" << e;
      }
    }
    return os.str();
  }

 private:
  Terms terms_;
};

}  // namespace semiweyl
