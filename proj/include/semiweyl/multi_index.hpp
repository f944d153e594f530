#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>

#include "semiweyl/errors.hpp"

namespace semiweyl {

// Multi-index of non-negative integers in dimension d <= kMaxDim.
class MultiIndex {
 public:
  static constexpr int kMaxDim = 4;

  MultiIndex() = default;
  explicit MultiIndex(int dim) : dim_(dim) {
    if (dim < 0 || dim > kMaxDim) throw DomainError("MultiIndex: unsupported dimension");
  }
  MultiIndex(std::initializer_list<int> entries) : dim_(static_cast<int>(entries.size())) {
    if (dim_ > kMaxDim) throw DomainError("MultiIndex: unsupported dimension");
    int i = 0;
    for (int e : entries) {
      if (e < 0) throw DomainError("MultiIndex: negative entry");
      v_[i++] = e;
    }
  }

  static MultiIndex zero(int dim) { return MultiIndex(dim); }
  static MultiIndex unit(int dim, int j) {
    MultiIndex m(dim);
    m.v_[j] = 1;
    return m;
  }

  int dim() const { return dim_; }
  int operator[](int i) const { return v_[i]; }
  int& operator[](int i) { return v_[i]; }

  int order() const {
    int s = 0;
    for (int i = 0; i < dim_; ++i) s += v_[i];
    return s;
  }
  bool is_zero() const { return order() == 0; }

  double factorial() const {
    double f = 1.0;
    for (int i = 0; i < dim_; ++i)
      for (int k = 2; k <= v_[i]; ++k) f *= k;
    return f;
  }

  // True when every entry of *this is <= the matching entry of o.
  bool le(const MultiIndex& o) const {
    for (int i = 0; i < dim_; ++i)
      if (v_[i] > o.v_[i]) return false;
    return true;
  }

  MultiIndex operator+(const MultiIndex& o) const {
    MultiIndex r(dim_);
    for (int i = 0; i < dim_; ++i) r.v_[i] = v_[i] + o.v_[i];
    return r;
  }
  // Throws if any entry would become negative.
  MultiIndex operator-(const MultiIndex& o) const {
    MultiIndex r(dim_);
    for (int i = 0; i < dim_; ++i) {
      r.v_[i] = v_[i] - o.v_[i];
      if (r.v_[i] < 0) throw DomainError("MultiIndex: negative difference");
    }
    return r;
  }

  auto operator<=>(const MultiIndex& o) const = default;
  bool operator==(const MultiIndex& o) const = default;

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ",";
      s += std::to_string(v_[i]);
    }
    return s + ")";
  }

 private:
  int dim_ = 0;
  std::array<int, kMaxDim> v_{};
};

inline std::ostream& operator<<(std::ostream& os, const MultiIndex& m) { return os << m.str(); }

// Product of binomial coefficients prod_i C(a_i, b_i).
inline double binomial(const MultiIndex& a, const MultiIndex& b) {
  double r = 1.0;
  for (int i = 0; i < a.dim(); ++i) {
    int n = a[i], k = b[i];
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
    r *= c;
  }
  return r;
}

// Calls fn(m) for every multi-index of dimension dim with |m| == order, in
// lexicographic order.
template <class Fn>
void for_each_multi_index(int dim, int order, Fn&& fn) {
  MultiIndex m(dim);
  if (dim == 0) {
    if (order == 0) fn(m);
    return;
  }
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == dim - 1) {
      m[pos] = left;
      fn(m);
      return;
    }
    for (int e = left; e >= 0; --e) {
      m[pos] = e;
      self(self, pos + 1, left - e);
    }
  };
  rec(rec, 0, order);
}

// Calls fn(b) for every b <= a entrywise.
template <class Fn>
void for_each_below(const MultiIndex& a, Fn&& fn) {
  MultiIndex m(a.dim());
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == a.dim()) {
      fn(m);
      return;
    }
    for (int e = 0; e <= a[pos]; ++e) {
      m[pos] = e;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
}

}  // namespace semiweyl
