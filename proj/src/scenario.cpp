#include "semiweyl/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "semiweyl/errors.hpp"

namespace semiweyl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ParseError("expected a number, got '" + text + "'");
  return v;
}

int parse_int(const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ParseError("expected an integer, got '" + text + "'");
  return v;
}

std::map<std::string, std::string> key_values(const std::vector<std::string>& w, std::size_t from) {
  std::map<std::string, std::string> kv;
  for (std::size_t i = from; i < w.size(); ++i) {
    const auto eq = w[i].find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value, got '" + w[i] + "'");
    kv[w[i].substr(0, eq)] = w[i].substr(eq + 1);
  }
  return kv;
}

}  // namespace

std::optional<std::string> ConfigSection::get(const std::string& key) const {
  std::optional<std::string> out;
  for (const auto& [k, v] : entries)
    if (k == key) out = v;
  return out;
}

std::vector<std::string> ConfigSection::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries)
    if (k == key) out.push_back(v);
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(item));
  return out;
}

cplx parse_factor(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError("empty factor");
  if (t.back() != 'i') return {parse_double(t), 0.0};
  const std::string re = t.substr(0, t.size() - 1);
  if (re.empty() || re == "+") return {0.0, 1.0};
  if (re == "-") return {0.0, -1.0};
  return {0.0, parse_double(re)};
}

FieldPtr parse_field(const std::string& text) {
  const auto w = words(text);
  if (w.empty()) throw ParseError("missing field family");
  const auto kv = key_values(w, 1);
  if (w[0] == "constant") {
    for (const auto& [k, v] : kv)
      if (k != "value") throw ParseError("constant: unknown key '" + k + "'");
    return constant_field(kv.count("value") ? parse_double(kv.at("value")) : 1.0);
  }
  FieldFamily family;
  if (w[0] == "smooth")
    family = FieldFamily::smooth;
  else if (w[0] == "abs_power")
    family = FieldFamily::abs_power;
  else if (w[0] == "weierstrass")
    family = FieldFamily::weierstrass;
  else
    throw ParseError("unknown field family '" + w[0] + "'");

  FieldParams p;
  if (family == FieldFamily::smooth) {
    p.k = 2;
    p.mu = 1.0;
  }
  for (const auto& [k, v] : kv) {
    if (k == "k")
      p.k = parse_int(v);
    else if (k == "mu")
      p.mu = parse_double(v);
    else if (k == "offset")
      p.offset = parse_double(v);
    else if (k == "scale")
      p.scale = parse_double(v);
    else if (k == "poly")
      p.poly = parse_list(v);
    else if (k == "cos")
      p.cos_terms = parse_list(v);
    else if (k == "sin")
      p.sin_terms = parse_list(v);
    else if (k == "omega")
      p.omega = parse_double(v);
    else if (k == "center")
      p.center = parse_double(v);
    else if (k == "sine_inner")
      p.sine_inner = parse_int(v) != 0;
    else if (k == "base")
      p.base = parse_double(v);
    else if (k == "terms")
      p.terms = parse_int(v);
    else if (k == "window")
      p.window = parse_double(v);
    else
      throw ParseError(w[0] + ": unknown key '" + k + "'");
  }
  try {
    return make_test_field(family, p);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

ProfilePtr parse_profile(const std::string& text) {
  const auto w = words(text);
  if (w.empty()) throw ParseError("missing profile kind");
  const auto kv = key_values(w, 1);
  auto num = [&](const std::string& key, std::optional<double> fallback) {
    if (kv.count(key)) return parse_double(kv.at(key));
    if (!fallback) throw ParseError(w[0] + ": missing key '" + key + "'");
    return *fallback;
  };
  try {
    if (w[0] == "bump") return bump_profile(num("plateau", std::nullopt), num("cutoff", std::nullopt), num("center", 0.0));
    if (w[0] == "gaussian") return gaussian_profile(num("width", 1.0));
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  throw ParseError("unknown profile '" + w[0] + "'");
}

double Scenario::mu() const {
  double best_tau = std::numeric_limits<double>::infinity(), mu = 1.0;
  for (const auto& t : form)
    if (!t.field->is_constant() && t.field->tau() < best_tau) {
      best_tau = t.field->tau();
      mu = t.field->mu();
    }
  return mu > 0.0 ? mu : 1.0;
}

double Scenario::weyl_delta() const {
  if (delta) return *delta;
  const double m = mu();
  return m / (1.0 + m);
}

double Scenario::riesz_delta(double g) const {
  if (delta) return *delta;
  return 1.0 - (1.0 + g) / (2.0 + mu());
}

double Scenario::tolerance(const std::string& key, double fallback) const {
  const auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

std::string Scenario::param(const std::string& section, const std::string& key, const std::string& fallback) const {
  const auto it = sections.find(section);
  if (it == sections.end()) return fallback;
  return it->second.get(key).value_or(fallback);
}

double Scenario::param(const std::string& section, const std::string& key, double fallback) const {
  const auto it = sections.find(section);
  if (it == sections.end()) return fallback;
  const auto v = it->second.get(key);
  return v ? parse_double(*v) : fallback;
}

std::vector<double> Scenario::param_list(const std::string& section, const std::string& key,
                                         std::vector<double> fallback) const {
  const auto it = sections.find(section);
  if (it == sections.end()) return fallback;
  const auto v = it->second.get(key);
  return v ? parse_list(*v) : fallback;
}

Scenario parse_scenario(std::istream& is, const std::string& source) {
  Scenario sc;
  std::string current;
  int lineno = 0;
  for (std::string raw; std::getline(is, raw);) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(source + ":" + std::to_string(lineno) + ": unterminated section");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ParseError(source + ":" + std::to_string(lineno) + ": empty section name");
      sc.sections[current].name = current;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || current.empty())
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected 'key = value' inside a section");
    auto& sec = sc.sections[current];
    sec.entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    sec.lines.push_back(lineno);
  }

  auto where = [&](const std::string& section, std::size_t i) {
    return source + ":" + std::to_string(sc.sections.at(section).lines.at(i)) + ": ";
  };
  auto wrap = [&](const std::string& section, std::size_t i, auto&& fn) {
    try {
      fn();
    } catch (const ParseError& e) {
      throw ParseError(where(section, i) + e.what());
    }
  };

  if (!sc.sections.count("scenario")) throw ParseError(source + ": missing [scenario] section");
  const auto& head = sc.sections.at("scenario");
  for (std::size_t i = 0; i < head.entries.size(); ++i) {
    const auto& [k, v] = head.entries[i];
    wrap("scenario", i, [&] {
      if (k == "name") {
        sc.name = v;
      } else if (k == "suites") {
        sc.suites.clear();
        for (const auto& s : split(v, ','))
          if (!s.empty()) sc.suites.push_back(s);
      } else if (k == "domain") {
        if (v != "interval" && v != "torus") throw ParseError("domain must be interval or torus");
        sc.domain = v;
      } else if (k == "x_lo") {
        sc.x_lo = parse_double(v);
      } else if (k == "x_hi") {
        sc.x_hi = parse_double(v);
      } else if (k == "n") {
        sc.n = parse_int(v);
      } else if (k == "hbar") {
        sc.hbar = parse_list(v);
      } else if (k == "gamma") {
        sc.gamma = parse_list(v);
      } else if (k == "delta") {
        if (v == "auto")
          sc.delta.reset();
        else
          sc.delta = parse_double(v);
      } else if (k == "eps_scale") {
        sc.eps_scale = parse_double(v);
      } else if (k == "T0") {
        sc.T0 = parse_double(v);
      } else {
        throw ParseError("unknown key '" + k + "'");
      }
    });
  }
  if (sc.name.empty()) throw ParseError(source + ": scenario name missing");
  if (sc.delta && !(*sc.delta > 0.0 && *sc.delta < 1.0)) throw ParseError(source + ": delta must lie in (0, 1)");
  if (!(sc.x_hi > sc.x_lo)) throw ParseError(source + ": need x_lo < x_hi");
  if (sc.n < 4) throw ParseError(source + ": n must be at least 4");
  for (double h : sc.hbar)
    if (!(h > 0.0)) throw ParseError(source + ": hbar values must be positive");
  for (double g : sc.gamma)
    if (!(g > 0.0 && g <= 1.0)) throw ParseError(source + ": gamma values must lie in (0, 1]");
  if (!(sc.T0 > 0.0)) throw ParseError(source + ": T0 must be positive");

  if (sc.sections.count("form")) {
    const auto& form = sc.sections.at("form");
    // Identical field specs share one field so conjugate partners match.
    std::map<std::string, FieldPtr> fields;
    for (std::size_t i = 0; i < form.entries.size(); ++i) {
      const auto& [k, v] = form.entries[i];
      wrap("form", i, [&] {
        if (k != "term") throw ParseError("unknown key '" + k + "'");
        const auto w = words(v);
        if (w.size() < 4) throw ParseError("term needs: alpha beta factor family [key=value ...]");
        FormTerm t;
        const int a = parse_int(w[0]), b = parse_int(w[1]);
        if (a < 0 || b < 0 || a > 1 || b > 1) throw ParseError("alpha and beta must be 0 or 1");
        t.alpha = MultiIndex{a};
        t.beta = MultiIndex{b};
        t.factor = parse_factor(w[2]);
        std::string rest;
        for (std::size_t j = 3; j < w.size(); ++j) rest += w[j] + " ";
        FieldPtr& field = fields[rest];
        if (!field) field = parse_field(rest);
        t.field = field;
        sc.form.push_back(std::move(t));
      });
    }
    try {
      check_form_symmetry(sc.form);
    } catch (const DomainError& e) {
      throw ParseError(source + ": " + e.what());
    }
  }

  if (sc.sections.count("tolerances")) {
    const auto& tol = sc.sections.at("tolerances");
    for (std::size_t i = 0; i < tol.entries.size(); ++i)
      wrap("tolerances", i, [&] { sc.tolerances[tol.entries[i].first] = parse_double(tol.entries[i].second); });
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse_scenario(in, path);
}

}  // namespace semiweyl
