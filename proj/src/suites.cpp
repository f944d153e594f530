#include "semiweyl/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "semiweyl/asymptotics.hpp"
#include "semiweyl/errors.hpp"
#include "semiweyl/funcalc.hpp"
#include "semiweyl/quantize.hpp"
#include "semiweyl/spectra.hpp"
#include "semiweyl/symcalc.hpp"

namespace semiweyl {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string Table::csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

bool SuiteResult::pass() const {
  for (const auto& c : criteria)
    if (!c.pass) return false;
  return true;
}

const Criterion* SuiteResult::find(const std::string& name) const {
  for (const auto& c : criteria)
    if (c.name == name) return &c;
  return nullptr;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "mollify-rates", "compose-residuals", "resolvent-residuals", "funcalc", "garding",
      "weyl-sweep",    "riesz-sweep",       "dos",                 "tauberian", "stationary-phase"};
  return names;
}

namespace {

using Row = std::vector<std::string>;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Criterion at_least(std::string name, double value, double threshold, std::string note = {}) {
  return {std::move(name), value, threshold, ">=", value >= threshold, std::move(note)};
}

Criterion at_most(std::string name, double value, double threshold, std::string note = {}) {
  return {std::move(name), value, threshold, "<=", value <= threshold, std::move(note)};
}

// Log-log slope; NaN when fewer than two points or a non-positive value.
double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return kNaN;
  for (double v : y)
    if (!(v > 0.0)) return kNaN;
  return fit_loglog(x, y).slope;
}

int pow2_at_least(double v) {
  int n = 8;
  while (n < v) n *= 2;
  return n;
}

FieldPtr smooth_field(std::vector<double> poly, std::vector<double> cos_terms = {}, std::vector<double> sin_terms = {}) {
  FieldParams p;
  p.k = 2;
  p.mu = 1.0;
  p.poly = std::move(poly);
  p.cos_terms = std::move(cos_terms);
  p.sin_terms = std::move(sin_terms);
  return make_test_field(FieldFamily::smooth, p);
}

// hD^2 + V + (hD)(-iG) + (iG)(hD) with V = cos x + sin(2x)/2, G = sin(x)/2.
Form default_torus_form() {
  const FieldPtr one = constant_field(1.0);
  const FieldPtr v = smooth_field({}, {0.0, 1.0}, {0.0, 0.0, 0.5});
  const FieldPtr g = smooth_field({}, {}, {0.0, 0.5});
  return {{MultiIndex{1}, MultiIndex{1}, one, 1.0},
          {MultiIndex{0}, MultiIndex{0}, v, 1.0},
          {MultiIndex{0}, MultiIndex{1}, g, cplx(0.0, 1.0)},
          {MultiIndex{1}, MultiIndex{0}, g, cplx(0.0, -1.0)}};
}

Form torus_form(const Scenario& sc) {
  if (sc.domain == "torus" && !sc.form.empty()) return sc.form;
  return default_torus_form();
}

PhaseGrid torus_grid(double hbar, double modes_per_inverse_hbar) {
  return PhaseGrid{pow2_at_least(modes_per_inverse_hbar / hbar), std::numbers::pi, hbar};
}

QuantizeOptions quantize_options(const SuiteOptions& opt) {
  QuantizeOptions q;
  q.strict = opt.strict;
  q.threads = opt.threads;
  return q;
}

void require_interval(const Scenario& sc, const std::string& suite) {
  if (sc.domain != "interval") throw ParseError(suite + ": scenario '" + sc.name + "' must use domain = interval");
  if (sc.form.empty()) throw ParseError(suite + ": scenario '" + sc.name + "' has no [form]");
}

std::vector<double> hbar_list(const Scenario& sc, const std::string& suite, std::vector<double> fallback) {
  auto v = sc.param_list(suite, "hbar", sc.hbar.empty() ? fallback : sc.hbar);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

// ------------------------------------------------------------ mollify-rates

SuiteResult mollify_rates(const Scenario& sc, const SuiteOptions& opt) {
  SuiteResult r;
  const FieldPtr f = parse_field(sc.param("mollify-rates", "field", std::string("abs_power k=1 mu=0.5")));
  const auto eps = sc.param_list("mollify-rates", "eps", {0.2, 0.1, 0.05, 0.025, 0.0125});
  const double lo = sc.param("mollify-rates", "window_lo", -0.5);
  const double hi = sc.param("mollify-rates", "window_hi", 0.5);
  const int samples = static_cast<int>(sc.param("mollify-rates", "samples", 1001.0));
  const double tol = sc.tolerance("mollify_slope_tol", 0.15);
  r.tolerances["mollify_slope_tol"] = tol;
  const int k = f->k();
  const double tau = f->tau();
  const KernelPtr kernel = MollifierKernel::standard();

  // sup |d^r (f - f_eps)| for r <= k and sup |d^{k+1} f_eps|.
  auto sups = parallel_map<std::vector<double>>(eps.size(), opt.threads, [&](std::size_t i) {
    const auto m = mollify(f, kernel, eps[i]);
    std::vector<double> s(k + 2, 0.0);
    for (int j = 0; j < samples; ++j) {
      const double x = lo + (hi - lo) * j / std::max(1, samples - 1);
      for (int o = 0; o <= k; ++o) s[o] = std::max(s[o], std::abs(f->deriv1(o, x) - m->deriv1(o, x)));
      s[k + 1] = std::max(s[k + 1], std::abs(m->deriv1(k + 1, x)));
    }
    return s;
  });

  Table t{"mollify-rates", {"eps"}, {}};
  for (int o = 0; o <= k; ++o) t.header.push_back("sup_err_d" + std::to_string(o));
  t.header.push_back("sup_moll_d" + std::to_string(k + 1));
  for (std::size_t i = 0; i < eps.size(); ++i) {
    Row row{format_number(eps[i])};
    for (double v : sups[i]) row.push_back(format_number(v));
    t.rows.push_back(row);
  }
  r.tables.push_back(t);

  for (int o = 0; o <= k + 1; ++o) {
    std::vector<double> y;
    for (const auto& s : sups) y.push_back(s[o]);
    const double slope = slope_of(eps, y);
    const double expected = tau - o;
    const std::string key = o <= k ? "order" + std::to_string(o) : "deriv" + std::to_string(o);
    r.slopes[key] = slope;
    r.criteria.push_back(at_most("mollify-" + key, std::abs(slope - expected), tol,
                                 "slope " + format_number(slope) + ", expected " + format_number(expected)));
  }
  return r;
}

// ------------------------------------------------------------ compose-residuals

struct SymbolPair {
  std::string name;
  std::function<std::pair<PolySymbol, PolySymbol>(double hbar)> make;
};

std::vector<SymbolPair> compose_pairs() {
  std::vector<SymbolPair> pairs;
  pairs.push_back({"smooth-p2-p2", [](double) {
                     PolySymbol a(1), b(1);
                     a.add({2}, smooth_field({1.0}, {0.0, 0.5}));
                     b.add({2}, smooth_field({}, {}, {0.0, 1.0}));
                     b.add({0}, smooth_field({}, {0.0, 0.0, 1.0}));
                     return std::make_pair(a, b);
                   }});
  pairs.push_back({"smooth-p1-p3", [](double) {
                     PolySymbol a(1), b(1);
                     a.add({1}, smooth_field({}, {0.0, 1.0}, {0.0, 0.0, 0.5}));
                     b.add({3}, smooth_field({1.0}, {}, {0.0, 0.3}));
                     return std::make_pair(a, b);
                   }});
  pairs.push_back({"mollified-p2-p1", [](double hbar) {
                     FieldParams p;
                     p.k = 1;
                     p.mu = 0.5;
                     p.sine_inner = true;
                     p.offset = 2.0;
                     const auto rough = make_test_field(FieldFamily::abs_power, p);
                     PolySymbol a(1), b(1);
                     a.add({2}, mollify(rough, MollifierKernel::standard(), std::sqrt(hbar)));
                     b.add({1}, smooth_field({}, {}, {0.0, 1.0}));
                     return std::make_pair(a, b);
                   }});
  return pairs;
}

SuiteResult compose_residuals(const Scenario& sc, const SuiteOptions& opt) {
  SuiteResult r;
  const auto hs = hbar_list(sc, "compose-residuals", {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64});
  const double modes = sc.param("compose-residuals", "modes", 16.0);
  const double margin = sc.tolerance("compose_slope_margin", 0.8);
  r.tolerances["compose_slope_margin"] = margin;
  const QuantizeOptions q = quantize_options(opt);
  constexpr int kMaxN = 2;

  Table t{"compose-residuals", {"pair", "hbar", "n", "residual_N0", "residual_N1", "residual_N2"}, {}};
  for (const auto& pair : compose_pairs()) {
    auto res = parallel_map<std::vector<double>>(hs.size(), opt.threads, [&](std::size_t i) {
      const double h = hs[i];
      const PhaseGrid g = torus_grid(h, modes);
      const auto [a, b] = pair.make(h);
      const auto c = moyal_terms(a, b, 0.5, kMaxN);
      const Eigen::MatrixXcd prod = weyl_quantize_on_torus(a, g, q).m * weyl_quantize_on_torus(b, g, q).m;
      std::vector<double> out;
      for (int N = 0; N <= kMaxN; ++N) {
        const SymbolSeries s(c.begin(), c.begin() + N + 1);
        out.push_back(spectral_norm(low_block(prod - weyl_quantize_series(s, g, q).m, g)));
      }
      return out;
    });
    for (std::size_t i = 0; i < hs.size(); ++i)
      t.rows.push_back({pair.name, format_number(hs[i]), std::to_string(torus_grid(hs[i], modes).n),
                        format_number(res[i][0]), format_number(res[i][1]), format_number(res[i][2])});
    for (int N = 0; N <= kMaxN; ++N) {
      std::vector<double> y;
      for (const auto& v : res) y.push_back(v[N]);
      const double slope = slope_of(hs, y);
      const std::string key = pair.name + ".N" + std::to_string(N);
      r.slopes[key] = slope;
      r.criteria.push_back(at_least("compose-" + key, slope, N + margin));
    }
  }
  r.tables.push_back(t);
  return r;
}

// ------------------------------------------------------------ resolvent-residuals

SuiteResult resolvent_residuals(const Scenario& sc, const SuiteOptions& opt) {
  SuiteResult r;
  const auto hs = hbar_list(sc, "resolvent-residuals", {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128});
  const double modes = sc.param("resolvent-residuals", "modes", 8.0);
  const cplx z(sc.param("resolvent-residuals", "z_re", -1.0), sc.param("resolvent-residuals", "z_im", 1.0));
  const int order = static_cast<int>(sc.param("resolvent-residuals", "order", 2.0));
  const double threshold = sc.tolerance("resolvent_slope", 2.7);
  r.tolerances["resolvent_slope"] = threshold;
  const QuantizeOptions q = quantize_options(opt);

  const Form form = torus_form(sc);
  const SymbolSeries base = weyl_symbol_of_form(form);
  const ResolventSymbolSeries rs = resolvent_symbols(base, order);
  SymbolEvaluator ev(rs.base);
  for (const auto& e : rs.b) ev.prepare(e);
  std::vector<SymbolEvaluator::Compiled> compiled;
  for (const auto& e : rs.b) compiled.push_back(ev.compile(e));

  std::vector<double> res(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double h = hs[i];
    const PhaseGrid g = torus_grid(h, modes);
    const OperatorMatrix B = weyl_quantize_function(
        [&](double x, std::span<const double> p, std::span<cplx> out) {
          const auto fx = ev.freeze(Point(&x, 1));
          for (std::size_t k = 0; k < p.size(); ++k) {
            cplx s = 0.0, hp = 1.0;
            for (const auto& c : compiled) {
              s += hp * ev.eval(c, fx, p.subspan(k, 1), {z, nullptr});
              hp *= h;
            }
            out[k] = s;
          }
        },
        g, q);
    const OperatorMatrix A = weyl_quantize_series(base, g, q);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(g.n, g.n);
    res[i] = spectral_norm(low_block((A.m - z * I) * B.m - I, g));
  }

  Table t{"resolvent-residuals", {"hbar", "n", "residual"}, {}};
  for (std::size_t i = 0; i < hs.size(); ++i)
    t.rows.push_back({format_number(hs[i]), std::to_string(torus_grid(hs[i], modes).n), format_number(res[i])});
  r.tables.push_back(t);
  const double slope = slope_of(hs, res);
  r.slopes["residual"] = slope;
  r.criteria.push_back(at_least("resolvent-slope", slope, threshold));
  return r;
}

// ------------------------------------------------------------ funcalc

struct NamedMatrix {
  std::string name;
  Eigen::MatrixXcd m;
};

std::vector<NamedMatrix> hs_test_matrices(const QuantizeOptions& q) {
  std::vector<NamedMatrix> out;
  {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
    d(0, 0) = -1.0;
    d(2, 2) = 1.0;
    out.push_back({"diag", d});
  }
  {
    std::mt19937 rng(20240607u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd m(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) m(i, j) = cplx(u(rng), u(rng));
    out.push_back({"random-hermitian", 0.25 * (m + m.adjoint())});
  }
  {
    const PhaseGrid g{16, std::numbers::pi, 0.25};
    out.push_back({"torus-weyl", form_on_torus(default_torus_form(), g, q).m});
  }
  {
    const FieldPtr one = constant_field(1.0);
    const FieldPtr v = smooth_field({-1.0, 0.0, 1.0});
    const Form h{{MultiIndex{1}, MultiIndex{1}, one, 1.0}, {MultiIndex{0}, MultiIndex{0}, v, 1.0}};
    out.push_back({"fd-harmonic", assemble_form_operator(h, {-2.5, 2.5, 31}, 0.2).dense()});
  }
  return out;
}

SuiteResult funcalc(const Scenario& sc, const SuiteOptions& opt) {
  SuiteResult r;
  const QuantizeOptions q = quantize_options(opt);
  const Form form = torus_form(sc);
  const SymbolSeries base = weyl_symbol_of_form(form);
  const ResolventSymbolSeries rs = resolvent_symbols(base, 1);

  // Operator residual of the two-term symbol.
  {
    const ProfilePtr f = parse_profile(sc.param("funcalc", "f", std::string("gaussian width=1")));
    const auto hs = hbar_list(sc, "funcalc", {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128});
    const double modes = sc.param("funcalc", "modes", 8.0);
    const double threshold = sc.tolerance("funcalc_slope", 1.8);
    r.tolerances["funcalc_slope"] = threshold;
    std::vector<double> res(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const PhaseGrid g = torus_grid(hs[i], modes);
      const Eigen::MatrixXcd fh = eig_apply(form_on_torus(form, g, q).m, *f);
      res[i] = spectral_norm(fh - quantize_funcalc(rs, f, 1, g, q).m);
    }
    Table t{"funcalc-residual", {"hbar", "n", "residual"}, {}};
    for (std::size_t i = 0; i < hs.size(); ++i)
      t.rows.push_back({format_number(hs[i]), std::to_string(torus_grid(hs[i], modes).n), format_number(res[i])});
    r.tables.push_back(t);
    const double slope = slope_of(hs, res);
    r.slopes["residual"] = slope;
    r.criteria.push_back(at_least("funcalc-slope", slope, threshold, "f = " + f->name()));
  }

  // a^f_1 = a_1 f'(a_0) as expressions.
  {
    const auto af = funcalc_symbols(rs, 1);
    const SymbolExpr expected = coef_atom(1, 1) * SymbolExpr::atom(SymAtom::outer(1, 1));
    const bool same = (af.at(1) - expected).is_zero();
    r.criteria.push_back({"funcalc-symbolic-identity", same ? 1.0 : 0.0, 1.0, "==", same, af.at(1).str()});
  }

  // Helffer-Sjoestrand against eigendecomposition.
  {
    const ProfilePtr f = parse_profile(sc.param("funcalc", "hs_f", std::string("bump plateau=0.5 cutoff=0.9")));
    const int terms = static_cast<int>(sc.param("funcalc", "hs_terms", 4.0));
    const double tol = sc.tolerance("hs_tol", 1e-3);
    r.tolerances["hs_tol"] = tol;
    HsQuadrature quad;
    quad.threads = opt.threads;
    Table t{"hs-oracle", {"matrix", "size", "error", "quadrature_estimate"}, {}};
    double worst = 0.0;
    std::string note;
    for (const auto& [name, m] : hs_test_matrices(q)) {
      double err = kNaN, est = kNaN;
      try {
        HsReport rep;
        const Eigen::MatrixXcd a = hs_apply(m, f, terms, quad, &rep);
        err = spectral_norm(a - eig_apply(m, *f));
        est = rep.error_estimate;
      } catch (const ConvergenceError& e) {
        note += name + ": " + e.what() + "; ";
        est = e.estimate();
      }
      worst = std::isnan(err) || std::isnan(worst) ? kNaN : std::max(worst, err);
      t.rows.push_back({name, std::to_string(m.rows()), format_number(err), format_number(est)});
    }
    r.tables.push_back(t);
    r.criteria.push_back(at_most("hs-vs-eig", worst, tol, note));
  }

  // Trace expansion with and without the hbar term.
  {
    const ProfilePtr f = parse_profile(sc.param("funcalc", "trace_f", std::string("bump plateau=0.3 cutoff=0.8")));
    const auto hs = sc.param_list("funcalc", "trace_hbar", {1.0 / 16, 1.0 / 32, 1.0 / 64});
    const double modes = sc.param("funcalc", "modes", 8.0);
    const double threshold = sc.tolerance("trace_slope", 1.8);
    const double ceiling = sc.tolerance("trace_slope_without_T1", 1.2);
    r.tolerances["trace_slope"] = threshold;
    r.tolerances["trace_slope_without_T1"] = ceiling;
    PhaseQuadrature pq;
    pq.threads = opt.threads;
    const auto T = trace_expansion_terms(rs, f, 1, pq);
    std::vector<double> e1(hs.size()), e0(hs.size()), tr(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double h = hs[i];
      const PhaseGrid g = torus_grid(h, modes);
      tr[i] = eig_apply(form_on_torus(form, g, q).m, *f).trace().real();
      const double lead = 1.0 / (2.0 * std::numbers::pi * h);
      // errors relative to the leading (2 pi hbar)^{-1} scale
      e1[i] = std::abs(tr[i] - lead * (T[0] + h * T[1])) / lead;
      e0[i] = std::abs(tr[i] - lead * T[0]) / lead;
    }
    Table t{"trace", {"hbar", "trace", "T0", "T1", "rel_err", "rel_err_without_T1"}, {}};
    for (std::size_t i = 0; i < hs.size(); ++i)
      t.rows.push_back({format_number(hs[i]), format_number(tr[i]), format_number(T[0]), format_number(T[1]),
                        format_number(e1[i]), format_number(e0[i])});
    r.tables.push_back(t);
    const double s1 = slope_of(hs, e1), s0 = slope_of(hs, e0);
    r.slopes["trace"] = s1;
    r.slopes["trace_without_T1"] = s0;
    r.criteria.push_back(at_least("trace-slope", s1, threshold));
    Criterion c{"trace-slope-without-T1", s0, ceiling, "<", s0 < ceiling, {}};
    r.criteria.push_back(c);
  }
  return r;
}

// ------------------------------------------------------------ garding

SuiteResult garding(const Scenario& sc, const SuiteOptions& opt) {
  SuiteResult r;
  const auto hs = hbar_list(sc, "garding", {0.2, 0.1, 0.05, 0.025});
  const double modes = sc.param("garding", "modes", 8.0);
  const double threshold = sc.tolerance("garding_slope", 0.9);
  r.tolerances["garding_slope"] = threshold;
  const QuantizeOptions q = quantize_options(opt);
  std::vector<PhaseGrid> grids;
  for (double h : hs) grids.push_back(torus_grid(h, modes));

  struct Case {
    std::string name;
    PolySymbol a;
  };
  std::vector<Case> cases;
  {
    // (p + sin x)^2 + cos^2 x = p^2 + 2 sin(x) p + 1
    PolySymbol a(1);
    a.add_constant({2}, 1.0);
    a.add({1}, smooth_field({}, {}, {0.0, 2.0}));
    a.add_constant({0}, 1.0);
    cases.push_back({"shifted-momentum", a});
  }
  {
    PolySymbol a(1);
    a.add({2}, smooth_field({0.5}, {0.0, 0.0, -0.5}));
    cases.push_back({"degenerate-sin2", a});
  }

  Table t{"garding", {"symbol", "hbar", "n", "min_eig", "negative_part"}, {}};
  for (const auto& c : cases) {
    const GardingReport rep = garding_check(c.a, grids, 1.0, q);
    std::vector<double> neg;
    bool vacuous = true;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      // Rounding floor relative to the largest symbol value on the grid.
      const double floor = 1e-11 * std::max(1.0, std::abs(c.a.eval(0.0, grids[i].p_max())));
      const double np = std::max(-rep.min_eig[i], 0.0);
      neg.push_back(np > floor ? np : 0.0);
      if (np > floor) vacuous = false;
      t.rows.push_back({c.name, format_number(hs[i]), std::to_string(grids[i].n), format_number(rep.min_eig[i]),
                        format_number(neg.back())});
    }
    if (vacuous) {
      r.slopes[c.name] = std::numeric_limits<double>::infinity();
      r.criteria.push_back(at_least("garding-" + c.name, std::numeric_limits<double>::infinity(), threshold,
                                    "negative part is zero at every hbar"));
    } else {
      const double s = slope_of(hs, neg);
      r.slopes[c.name] = s;
      r.criteria.push_back(at_least("garding-" + c.name, s, threshold));
    }
  }
  r.tables.push_back(t);
  return r;
}

// ------------------------------------------------------------ spectral sweeps

const std::vector<std::string> kSweepHeader = {"hbar",      "E",         "count",    "riesz_gamma", "smoothed_density",
                                               "weyl_term", "two_term",  "err_count", "err_riesz"};

Row sweep_row(double h, double E, const std::string& count, const std::string& gamma, const std::string& density,
              const std::string& weyl, const std::string& two, const std::string& err_count,
              const std::string& err_riesz) {
  return {format_number(h), format_number(E), count, gamma, density, weyl, two, err_count, err_riesz};
}

Tridiagonal interval_operator(const Form& form, const Scenario& sc, double h, int n) {
  return assemble_form_operator(form, IntervalGrid{sc.x_lo, sc.x_hi, n}, h).real_form();
}

struct FramingPoint {
  double eps = 0.0;
  int count = 0, plus = 0, minus = 0;
  int violations = 0;
};

FramingPoint framing_point(const Scenario& sc, double h, const std::vector<double>& eigs) {
  FramingPoint fp;
  fp.count = static_cast<int>(eigs.size());
  fp.eps = std::min(1.0, sc.eps_scale * std::pow(h, 1.0 - sc.weyl_delta()));
  const auto fr = build_framing_symbols(sc.form, fp.eps, MollifierKernel::standard());
  const auto ep = eigenvalues_below(interval_operator(fr.plus_form, sc, h, sc.n), 0.0);
  const auto em = eigenvalues_below(interval_operator(fr.minus_form, sc, h, sc.n), 0.0);
  fp.plus = static_cast<int>(ep.size());
  fp.minus = static_cast<int>(em.size());
  const double slack = 1e-9;
  if (fp.plus > fp.count) ++fp.violations;
  if (fp.count > fp.minus) ++fp.violations;
  for (std::size_t k = 0; k < ep.size() && k < eigs.size(); ++k)
    if (ep[k] < eigs[k] - slack) ++fp.violations;
  for (std::size_t k = 0; k < eigs.size() && k < em.size(); ++k)
    if (eigs[k] < em[k] - slack) ++fp.violations;
  return fp;
}

SuiteResult weyl_sweep(const Scenario& sc, const SuiteOptions& opt) {
  require_interval(sc, "weyl-sweep");
  SuiteResult r;
  const auto hs = hbar_list(sc, "weyl-sweep", {0.04, 0.02, 0.01, 0.005});
  const double abs_tol = sc.tolerance("weyl_abs", 1.0);
  const double rel_tol = sc.tolerance("weyl_rel", 0.0);
  const double gap_tol = sc.tolerance("framing_gap", 3.0);
  const double gap_hbar = sc.param("weyl-sweep", "framing_hbar", 0.01);
  r.tolerances["weyl_abs"] = abs_tol;
  r.tolerances["weyl_rel"] = rel_tol;
  r.tolerances["framing_gap"] = gap_tol;

  const VolumeResult vol = weyl_volume(principal_symbol(sc.form), 0.0);
  struct SweepPoint {
    int count;
    FramingPoint framing;
  };
  auto pts = parallel_map<SweepPoint>(hs.size(), opt.threads, [&](std::size_t i) {
    const auto eigs = eigenvalues_below(interval_operator(sc.form, sc, hs[i], sc.n), 0.0);
    return SweepPoint{static_cast<int>(eigs.size()), framing_point(sc, hs[i], eigs)};
  });

  Table t{"weyl-sweep", kSweepHeader, {}};
  for (const char* extra : {"eps", "count_plus", "count_minus", "interlacing_violations"}) t.header.push_back(extra);
  std::vector<double> errs;
  double worst_ratio = 0.0;
  int violations = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double weyl = vol.value / (2.0 * std::numbers::pi * hs[i]);
    const double err = pts[i].count - weyl;
    errs.push_back(std::abs(err));
    worst_ratio = std::max(worst_ratio, std::abs(err) / (abs_tol + rel_tol * weyl));
    violations += pts[i].framing.violations;
    Row row = sweep_row(hs[i], 0.0, std::to_string(pts[i].count), "", "", format_number(weyl), "", format_number(err), "");
    for (const auto& v : {format_number(pts[i].framing.eps), std::to_string(pts[i].framing.plus),
                          std::to_string(pts[i].framing.minus), std::to_string(pts[i].framing.violations)})
      row.push_back(v);
    t.rows.push_back(row);
  }
  r.tables.push_back(t);
  r.slopes["err_count"] = slope_of(hs, errs);
  r.criteria.push_back(at_most("weyl-count-bound", worst_ratio, 1.0,
                               "max |N - weyl| / (" + format_number(abs_tol) + " + " + format_number(rel_tol) +
                                   " weyl), volume " + format_number(vol.value)));
  r.criteria.push_back(at_most("framing-interlacing", violations, 0.0));

  FramingPoint gp;
  const auto it = std::find_if(hs.begin(), hs.end(), [&](double h) { return std::abs(h - gap_hbar) < 1e-12; });
  if (it != hs.end()) {
    gp = pts[it - hs.begin()].framing;
  } else {
    gp = framing_point(sc, gap_hbar, eigenvalues_below(interval_operator(sc.form, sc, gap_hbar, sc.n), 0.0));
    r.criteria.push_back(at_most("framing-interlacing-extra", gp.violations, 0.0));
  }
  r.criteria.push_back(at_most("framing-gap", gp.minus - gp.plus, gap_tol, "hbar " + format_number(gap_hbar)));
  return r;
}

SuiteResult riesz_sweep(const Scenario& sc, const SuiteOptions& opt) {
  require_interval(sc, "riesz-sweep");
  SuiteResult r;
  const auto hs = hbar_list(sc, "riesz-sweep", {0.04, 0.02, 0.01, 0.005});
  const auto gammas = sc.gamma.empty() ? std::vector<double>{0.5, 1.0} : sc.gamma;
  const double margin = sc.tolerance("riesz_slope_margin", 0.2);
  r.tolerances["riesz_slope_margin"] = margin;
  const KernelPtr kernel = MollifierKernel::standard();

  Table t{"riesz-sweep", kSweepHeader, {}};
  for (const char* extra : {"riesz", "eps", "psi0", "psi1"}) t.header.push_back(extra);
  for (double g : gammas) {
    struct RieszPoint {
      int count;
      double riesz, eps, psi0, psi1;
    };
    auto pts = parallel_map<RieszPoint>(hs.size(), opt.threads, [&](std::size_t i) {
      const double h = hs[i];
      // Second-order finite differences: extrapolate from grids h and h/2.
      const auto eigs = eigenvalues_below(interval_operator(sc.form, sc, h, sc.n), 0.0);
      const double coarse = riesz_mean(eigs, g);
      const double fine = riesz_mean(eigenvalues_below(interval_operator(sc.form, sc, h, 2 * sc.n + 1), 0.0), g);
      const double eps = std::min(1.0, sc.eps_scale * std::pow(h, 1.0 - sc.riesz_delta(g)));
      const Form moll = mollify_form(sc.form, eps, kernel);
      const RieszTerms psi = riesz_phase_terms(principal_symbol(moll), subprincipal_from_form(moll), g);
      return RieszPoint{static_cast<int>(eigs.size()), (4.0 * fine - coarse) / 3.0, eps, psi.psi0, psi.psi1};
    });
    std::vector<double> rel;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double h = hs[i];
      const double lead = pts[i].psi0 / (2.0 * std::numbers::pi * h);
      const double two = (pts[i].psi0 + h * pts[i].psi1) / (2.0 * std::numbers::pi * h);
      const double err = pts[i].riesz - two;
      rel.push_back(std::abs(err) * h);
      Row row = sweep_row(h, 0.0, std::to_string(pts[i].count), format_number(g), "", format_number(lead),
                          format_number(two), "", format_number(err));
      for (double v : {pts[i].riesz, pts[i].eps, pts[i].psi0, pts[i].psi1}) row.push_back(format_number(v));
      t.rows.push_back(row);
    }
    const std::string key = "gamma" + format_number(g);
    const double slope = slope_of(hs, rel);
    r.slopes["err_riesz_times_hbar." + key] = slope;
    r.criteria.push_back(at_least("riesz-slope-" + key, slope, g - margin));
  }
  r.tables.push_back(t);
  return r;
}

SuiteResult dos(const Scenario& sc, const SuiteOptions& opt) {
  require_interval(sc, "dos");
  SuiteResult r;
  const double h = sc.param("dos", "hbar", 0.01);
  const ProfilePtr f = parse_profile(sc.param("dos", "f", std::string("bump plateau=0.3 cutoff=0.6")));
  const double lo = sc.param("dos", "s_lo", -0.25), hi = sc.param("dos", "s_hi", 0.25);
  const int points = static_cast<int>(sc.param("dos", "points", 51.0));
  const auto T0s = sc.param_list("dos", "T0", {sc.T0, 0.5});
  const double tol = sc.tolerance("dos_rel", 0.1);
  r.tolerances["dos_rel"] = tol;
  if (!f->support()) throw ParseError("dos: f must have compact support");

  const PolySymbol a0 = principal_symbol(sc.form);
  const auto eigs = eigenvalues_below(interval_operator(sc.form, sc, h, sc.n), f->support()->second);
  const double lead = 1.0 / (2.0 * std::numbers::pi * h);
  std::vector<double> s(points), xi(points);
  const PolySymbol one = monomial_symbol(MultiIndex{0});
  auto xi_vals = parallel_map<double>(points, opt.threads, [&](std::size_t i) {
    const double si = lo + (hi - lo) * i / std::max(1, points - 1);
    return f->eval(si) * coarea_density(a0, one, si);
  });
  double xi_max = 0.0;
  for (int i = 0; i < points; ++i) {
    s[i] = lo + (hi - lo) * i / std::max(1, points - 1);
    xi[i] = xi_vals[i];
    xi_max = std::max(xi_max, std::abs(xi[i]));
  }

  Table t{"dos", kSweepHeader, {}};
  for (const char* extra : {"T0", "xi0"}) t.header.push_back(extra);
  for (double T0 : T0s) {
    const SmoothingKernel k(h, T0);
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      const double d = smoothed_counting_density(eigs, k, *f, s[i]);
      worst = std::max(worst, std::abs(d - lead * xi[i]));
      Row row = sweep_row(h, s[i], "", "", format_number(d), format_number(lead * xi[i]), "", "", "");
      row.push_back(format_number(T0));
      row.push_back(format_number(xi[i]));
      t.rows.push_back(row);
    }
    r.criteria.push_back(at_most("dos-T0=" + format_number(T0), worst / (lead * xi_max), tol,
                                 "sup error relative to max xi0 / (2 pi hbar)"));
  }
  r.tables.push_back(t);
  return r;
}

SuiteResult tauberian(const Scenario& sc, const SuiteOptions& opt) {
  require_interval(sc, "tauberian");
  SuiteResult r;
  const auto hs = hbar_list(sc, "tauberian", {0.04, 0.02, 0.01, 0.005});
  const auto T0s = sc.param_list("tauberian", "T0", {sc.T0, 0.5});
  const double bound = sc.tolerance("tauberian_bound", 2.0);
  r.tolerances["tauberian_bound"] = bound;
  Table t{"tauberian", {"hbar", "T0", "count", "gap"}, {}};
  for (double T0 : T0s) {
    auto gaps = parallel_map<std::pair<int, double>>(hs.size(), opt.threads, [&](std::size_t i) {
      const double h = hs[i];
      const SmoothingKernel k(h, T0);
      const Tridiagonal T = interval_operator(sc.form, sc, h, sc.n);
      const auto eigs = eigenvalues_below(T, 50.0 * h / T0);
      return std::make_pair(sturm_count_below(T, 0.0), tauberian_gap(eigs, k, 0.0));
    });
    std::vector<double> g;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      g.push_back(gaps[i].second);
      t.rows.push_back({format_number(hs[i]), format_number(T0), std::to_string(gaps[i].first),
                        format_number(gaps[i].second)});
    }
    r.slopes["gap.T0=" + format_number(T0)] = slope_of(hs, g);
    r.criteria.push_back(at_most("tauberian-gap-T0=" + format_number(T0), *std::max_element(g.begin(), g.end()), bound));
  }
  r.tables.push_back(t);
  return r;
}

// ------------------------------------------------------------ stationary phase

SuiteResult stationary_phase(const Scenario& sc, const SuiteOptions&) {
  SuiteResult r;
  const auto hs = hbar_list(sc, "stationary-phase", {0.2, 0.1, 0.05, 0.025});
  const double b = sc.param("stationary-phase", "B", 1.0);
  const double margin = sc.tolerance("stationary_slope_margin", 0.8);
  r.tolerances["stationary_slope_margin"] = margin;
  if (b == 0.0) throw ParseError("stationary-phase: B must be nonzero");

  // a(v) = exp(-v^2 / 2): d^{2m} a(0) = (-1)^m (2m - 1)!!.
  Amplitude a;
  a.derivative_at_zero = [](const MultiIndex& m) {
    const int k = m[0];
    if (k % 2) return 0.0;
    double v = 1.0;
    for (int i = 1; i <= k / 2; ++i) v *= -(2.0 * i - 1.0);
    return v;
  };
  a.value = [](double v) { return std::exp(-0.5 * v * v); };
  a.radius = 9.0;
  Eigen::MatrixXd B(1, 1);
  B(0, 0) = b;

  Table t{"stationary-phase", {"hbar", "N", "expansion_re", "expansion_im", "exact_re", "exact_im", "remainder"}, {}};
  for (int N = 0; N <= 2; ++N) {
    std::vector<double> rem;
    for (double h : hs) {
      const ExpansionResult e = stationary_phase_expand(B, a, h, N);
      const cplx exact = std::sqrt(2.0 * std::numbers::pi / cplx(1.0, -b / h));
      const cplx v = e.value();
      rem.push_back(std::abs(exact - v));
      t.rows.push_back({format_number(h), std::to_string(N), format_number(v.real()), format_number(v.imag()),
                        format_number(exact.real()), format_number(exact.imag()), format_number(rem.back())});
    }
    const double slope = slope_of(hs, rem);
    r.slopes["N" + std::to_string(N)] = slope;
    r.criteria.push_back(at_least("stationary-N" + std::to_string(N), slope, N + margin));
  }
  r.tables.push_back(t);
  return r;
}

}  // namespace

SuiteResult run_suite(const Scenario& sc, const std::string& suite, const SuiteOptions& opt) {
  static const std::map<std::string, std::function<SuiteResult(const Scenario&, const SuiteOptions&)>> table = {
      {"mollify-rates", mollify_rates}, {"compose-residuals", compose_residuals},
      {"resolvent-residuals", resolvent_residuals}, {"funcalc", funcalc},
      {"garding", garding}, {"weyl-sweep", weyl_sweep},
      {"riesz-sweep", riesz_sweep}, {"dos", dos},
      {"tauberian", tauberian}, {"stationary-phase", stationary_phase}};
  const auto it = table.find(suite);
  if (it == table.end()) throw ParseError("unknown suite '" + suite + "'");
  SuiteResult r = it->second(sc, opt);
  r.suite = suite;
  return r;
}

}  // namespace semiweyl
