#include "semiweyl/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include "semiweyl/errors.hpp"

namespace semiweyl {

const GaussRule& gauss_legendre(int q) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  if (q < 1) throw DomainError("gauss_legendre: need at least one node");
  GaussRule g;
  g.nodes.resize(q);
  g.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= q; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = q * (x * p1 - p0) / (x * x - 1.0);
    g.nodes[i] = x;
    g.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (q == 1) {
    g.nodes[0] = 0.0;
    g.weights[0] = 2.0;
  }
  return cache.emplace(q, std::move(g)).first->second;
}

template <class T>
static T pairwise_impl(std::span<const T> v) {
  if (v.size() <= 8) {
    T s{};
    for (const T& x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_impl(v.subspan(0, h)) + pairwise_impl(v.subspan(h));
}

double pairwise_sum(std::span<const double> v) { return pairwise_impl(v); }
cplx pairwise_sum(std::span<const cplx> v) { return pairwise_impl(v); }

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_loglog: need two or more points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("fit_loglog: non-positive value");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_loglog: degenerate abscissae");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i)
    f.residual = std::max(f.residual, std::abs(ly[i] - f.slope * lx[i] - f.intercept));
  return f;
}

// ---------------------------------------------------------------- Jet

double Jet::derivative(int r) const {
  if (r > order()) throw DomainError("Jet: derivative order exceeds jet order");
  double f = 1.0;
  for (int k = 2; k <= r; ++k) f *= k;
  return c_[r] * f;
}

Jet& Jet::operator+=(const Jet& o) {
  const int n = std::min(order(), o.order());
  c_.resize(n + 1);
  for (int k = 0; k <= n; ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  const int n = std::min(order(), o.order());
  c_.resize(n + 1);
  for (int k = 0; k <= n; ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int n = std::min(a.order(), b.order());
  Jet r(n, 0.0);
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
    r.c_[k] = s;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  const int n = std::min(a.order(), b.order());
  if (b.c_[0] == 0.0) throw DomainError("Jet: division by zero");
  Jet q(n, 0.0);
  for (int k = 0; k <= n; ++k) {
    double s = a.c_[k];
    for (int i = 1; i <= k; ++i) s -= b.c_[i] * q.c_[k - i];
    q.c_[k] = s / b.c_[0];
  }
  return q;
}

Jet Jet::compose(std::span<const double> g, const Jet& u) {
  const int n = u.order();
  Jet delta = u;
  delta.c_[0] = 0.0;
  const int m = std::min<int>(n, static_cast<int>(g.size()) - 1);
  Jet r(n, m >= 0 ? g[m] : 0.0);
  for (int k = m - 1; k >= 0; --k) {
    r = r * delta;
    r.c_[0] += g[k];
  }
  return r;
}

namespace {
std::vector<double> inv_factorials(int n) {
  std::vector<double> f(n + 1, 1.0);
  for (int k = 1; k <= n; ++k) f[k] = f[k - 1] / k;
  return f;
}
}  // namespace

Jet exp(const Jet& u) {
  const int n = u.order();
  auto f = inv_factorials(n);
  const double e = std::exp(u.value());
  for (double& c : f) c *= e;
  return Jet::compose(f, u);
}

Jet sin(const Jet& u) {
  const int n = u.order();
  auto f = inv_factorials(n);
  const double s = std::sin(u.value()), c = std::cos(u.value());
  const double cyc[4] = {s, c, -s, -c};
  for (int k = 0; k <= n; ++k) f[k] *= cyc[k % 4];
  return Jet::compose(f, u);
}

Jet cos(const Jet& u) {
  const int n = u.order();
  auto f = inv_factorials(n);
  const double s = std::sin(u.value()), c = std::cos(u.value());
  const double cyc[4] = {c, -s, -c, s};
  for (int k = 0; k <= n; ++k) f[k] *= cyc[k % 4];
  return Jet::compose(f, u);
}

Jet sqrt(const Jet& u) {
  if (!(u.value() > 0.0)) throw DomainError("Jet sqrt: argument must be positive");
  return abs_pow(u, 0.5);
}

Jet abs_pow(const Jet& u, double s) {
  const int n = u.order();
  const double u0 = u.value();
  std::vector<double> g(n + 1, 0.0);
  if (u0 == 0.0) {
    const bool integer = s >= 0 && std::floor(s) == s;
    if (integer && static_cast<long>(s) % 2 == 0) {
      if (static_cast<int>(s) <= n) g[static_cast<int>(s)] = 1.0;
    } else if (n >= s) {
      throw DomainError("abs_pow: derivative of order >= exponent requested at the kink");
    }
    return Jet::compose(g, u);
  }
  const double a = std::abs(u0), sg = u0 > 0 ? 1.0 : -1.0;
  double fall = 1.0, invf = 1.0, sgk = 1.0;
  for (int k = 0; k <= n; ++k) {
    g[k] = fall * std::pow(a, s - k) * sgk * invf;
    fall *= (s - k);
    invf /= (k + 1);
    sgk *= sg;
  }
  return Jet::compose(g, u);
}

// ---------------------------------------------------------------- bumps

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

Jet smooth_step(const Jet& t) {
  const int n = t.order();
  const double t0 = t.value();
  constexpr double kFlat = 2e-3;
  if (t0 <= kFlat) {
    Jet z(n, 0.0);
    if (t0 > 0.0) z[0] = smooth_step(t0);
    return z;
  }
  if (t0 >= 1.0 - kFlat) {
    Jet o(n, 1.0);
    if (t0 < 1.0) o[0] = smooth_step(t0);
    return o;
  }
  Jet one(n, 1.0);
  Jet a = exp((one / t) * -1.0);
  Jet b = exp((one / (1.0 - t)) * -1.0);
  return a / (a + b);
}

double plateau_bump(double x, double a, double b) {
  return smooth_step((b - std::abs(x)) / (b - a));
}

Jet plateau_bump(const Jet& x, double a, double b) {
  const double x0 = x.value();
  if (std::abs(x0) < a) return Jet(x.order(), 1.0);
  const Jet u = x0 >= 0 ? x : x * -1.0;
  return smooth_step((b - u) * (1.0 / (b - a)));
}

// ---------------------------------------------------------------- threads

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SEMIWEYL_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace semiweyl
