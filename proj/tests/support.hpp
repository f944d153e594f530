#pragma once

#include <cmath>
#include <vector>

#include "semiweyl/coeffs.hpp"
#include "semiweyl/symbol.hpp"

namespace testing {

using namespace semiweyl;

inline FieldPtr poly_field(std::vector<double> c) {
  FieldParams p;
  p.poly = std::move(c);
  return make_test_field(FieldFamily::smooth, p);
}

inline FieldPtr trig_field(std::vector<double> cos_terms, std::vector<double> sin_terms, double offset = 0.0) {
  FieldParams p;
  p.cos_terms = std::move(cos_terms);
  p.sin_terms = std::move(sin_terms);
  p.offset = offset;
  return make_test_field(FieldFamily::smooth, p);
}

// p^2 + V(x) - shift.
inline PolySymbol schroedinger_symbol(FieldPtr V, double shift = 0.0) {
  PolySymbol a(1);
  a.add_constant(MultiIndex{2}, 1.0);
  a.add(MultiIndex{0}, V);
  if (shift != 0.0) a.add_constant(MultiIndex{0}, -shift);
  return a;
}

inline double linspace(double lo, double hi, int n, int i) { return lo + (hi - lo) * i / (n - 1); }

}  // namespace testing
