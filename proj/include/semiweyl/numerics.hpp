#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace semiweyl {

using cplx = std::complex<double>;

// Gauss-Legendre rule with q nodes on [-1, 1]. Cached per q.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int q);

// Composite Gauss-Legendre integral of fn over [a, b] with `panels` panels.
template <class Fn>
auto integrate_gl(Fn&& fn, double a, double b, int panels, int q = 16) {
  const GaussRule& g = gauss_legendre(q);
  const double w = (b - a) / panels;
  using R = decltype(fn(a));
  R acc{};
  for (int k = 0; k < panels; ++k) {
    const double c = a + (k + 0.5) * w;
    R part{};
    for (int i = 0; i < q; ++i) part += g.weights[i] * fn(c + 0.5 * w * g.nodes[i]);
    acc += 0.5 * w * part;
  }
  return acc;
}

// Deterministic pairwise (tree) summation.
double pairwise_sum(std::span<const double> v);
cplx pairwise_sum(std::span<const cplx> v);

// Least-squares fit of log(y) = slope*log(x) + c.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max abs deviation in log space
};
// Points with non-positive y are rejected with DomainError.
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

// Truncated Taylor series c_0 + c_1 t + ... + c_n t^n of a function around a
// point. Arithmetic is truncated at the common order.
class Jet {
 public:
  Jet() = default;
  Jet(int order, double value) : c_(order + 1, 0.0) { c_[0] = value; }
  static Jet variable(int order, double at) {
    Jet j(order, at);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return c_[k]; }
  double& operator[](int k) { return c_[k]; }
  double value() const { return c_[0]; }
  // r-th derivative of the underlying function at the expansion point.
  double derivative(int r) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, const Jet& a) { return (a * -1.0) + s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

  // g(u) for a function g given by its Taylor coefficients g^{(k)}(u0)/k!
  // at u0 = u.value().
  static Jet compose(std::span<const double> g_taylor, const Jet& u);

 private:
  std::vector<double> c_;
};

Jet exp(const Jet& u);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet sqrt(const Jet& u);
// |u|^s; requires u.value() != 0 unless s is a non-negative integer.
Jet abs_pow(const Jet& u, double s);

// Smooth transition: 0 for t <= 0, 1 for t >= 1, C^infinity in between.
double smooth_step(double t);
Jet smooth_step(const Jet& t);

// Plateau bump: 1 on [-a, a], 0 outside (-b, b), smooth and even.
double plateau_bump(double x, double a, double b);
Jet plateau_bump(const Jet& x, double a, double b);

// Number of worker threads: explicit value, else SEMIWEYL_THREADS, else 1.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results are written
// by index so output order is independent of scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, int threads, Fn&& fn) {
  std::vector<R> out(n);
  parallel_for(n, threads, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace semiweyl
