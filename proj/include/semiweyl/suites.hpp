#pragma once

#include <map>
#include <string>
#include <vector>

#include "semiweyl/scenario.hpp"

namespace semiweyl {

// CSV table; every cell is preformatted so reruns are byte-identical.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const;
};

struct Criterion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  // ">=" or "<="; "==" for exact checks reported as 0/1.
  std::string relation;
  bool pass = false;
  std::string note;
};

struct SuiteResult {
  std::string suite;
  std::vector<Table> tables;
  std::map<std::string, double> slopes;
  std::map<std::string, double> tolerances;
  std::vector<Criterion> criteria;

  bool pass() const;
  const Criterion* find(const std::string& name) const;
};

struct SuiteOptions {
  int threads = 1;
  // Also fail on aliasing or Nyquist warnings from torus quantization.
  bool strict = false;
};

const std::vector<std::string>& suite_names();

// Throws ParseError for an unknown suite name.
SuiteResult run_suite(const Scenario& scenario, const std::string& suite, const SuiteOptions& opt = {});

// Formats a double with 12 significant digits; non-finite values as inf/-inf/nan.
std::string format_number(double v);

}  // namespace semiweyl
