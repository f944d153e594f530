#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semiweyl/coeffs.hpp"
#include "semiweyl/function_profile.hpp"

namespace semiweyl {

// Key/value pairs of one [section]; keys may repeat.
struct ConfigSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<int> lines;

  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;
};

// "family key=value ..." with families constant, smooth, abs_power and
// weierstrass. Smooth fields default to k = 2, mu = 1.
FieldPtr parse_field(const std::string& text);
// "bump plateau=a cutoff=b [center=c]" or "gaussian width=w".
ProfilePtr parse_profile(const std::string& text);
// Real or imaginary literal: 2, -0.5, i, -i, 0.5i.
cplx parse_factor(const std::string& text);
std::vector<double> parse_list(const std::string& text);

struct Scenario {
  std::string name;
  std::vector<std::string> suites;
  // "interval" (Dirichlet finite differences) or "torus".
  std::string domain = "interval";
  Form form;
  double x_lo = -2.5;
  double x_hi = 2.5;
  int n = 4095;
  std::vector<double> hbar;
  std::vector<double> gamma;
  std::optional<double> delta;
  double eps_scale = 1.0;
  double T0 = 1.0;
  std::map<std::string, double> tolerances;
  std::map<std::string, ConfigSection> sections;

  // Hoelder exponent of the roughest non-constant coefficient (1 if none).
  double mu() const;
  // delta = mu / (1 + mu) unless set.
  double weyl_delta() const;
  // delta = 1 - (1 + gamma) / (2 + mu) unless set.
  double riesz_delta(double gamma) const;
  double tolerance(const std::string& key, double fallback) const;
  std::string param(const std::string& section, const std::string& key, const std::string& fallback) const;
  double param(const std::string& section, const std::string& key, double fallback) const;
  std::vector<double> param_list(const std::string& section, const std::string& key,
                                 std::vector<double> fallback) const;
};

// Throws ParseError with the offending line number.
Scenario parse_scenario(std::istream& is, const std::string& source = "<config>");
Scenario load_scenario(const std::string& path);

}  // namespace semiweyl
