// Runs the bundled scenarios and prints one verdict per acceptance criterion.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "semiweyl/errors.hpp"
#include "semiweyl/numerics.hpp"
#include "semiweyl/scenario.hpp"
#include "semiweyl/suites.hpp"

using namespace semiweyl;

namespace {

struct Runner {
  SuiteOptions opt;
  std::map<std::string, Scenario> scenarios;
  std::map<std::pair<std::string, std::string>, SuiteResult> results;

  const SuiteResult& get(const std::string& scenario, const std::string& suite) {
    const auto key = std::pair{scenario, suite};
    auto it = results.find(key);
    if (it != results.end()) return it->second;
    if (!scenarios.count(scenario))
      scenarios[scenario] = load_scenario(std::string(SEMIWEYL_SCENARIO_DIR) + "/" + scenario + ".cfg");
    SuiteResult r;
    r.suite = suite;
    try {
      r = run_suite(scenarios.at(scenario), suite, opt);
    } catch (const Error& e) {
      r.criteria.push_back({"suite-error", 0.0, 0.0, "==", false, e.what()});
    }
    return results.emplace(key, std::move(r)).first->second;
  }
};

struct Selection {
  std::string scenario;
  std::string suite;
  // Criterion names with this prefix.
  std::string prefix;
};

std::string describe(const Criterion& c) {
  return c.name + " " + format_number(c.value) + " " + c.relation + " " + format_number(c.threshold) +
         (c.note.empty() ? "" : " (" + c.note + ")");
}

}  // namespace

int main() {
  Runner run;
  run.opt.threads = std::getenv("SEMIWEYL_THREADS") ? resolve_threads(0)
                                                    : std::max(1u, std::thread::hardware_concurrency());

  const std::vector<std::pair<std::string, std::vector<Selection>>> criteria = {
      {"mollification rates", {{"calculus", "mollify-rates", "mollify-"}}},
      {"composition residual", {{"calculus", "compose-residuals", "compose-"}}},
      {"resolvent parametrix", {{"torus", "resolvent-residuals", "resolvent-slope"}}},
      {"functional calculus", {{"torus", "funcalc", "funcalc-"}}},
      {"Helffer-Sjoestrand oracle", {{"torus", "funcalc", "hs-vs-eig"}}},
      {"trace expansion", {{"torus", "funcalc", "trace-slope"}}},
      {"Weyl law", {{"harmonic", "weyl-sweep", "weyl-count-bound"}, {"rough_weyl", "weyl-sweep", "weyl-count-bound"}}},
      {"Riesz means", {{"harmonic", "riesz-sweep", "riesz-slope-"}, {"rough_riesz", "riesz-sweep", "riesz-slope-"}}},
      {"smoothed density of states", {{"harmonic", "dos", "dos-"}}},
      {"sharp Garding", {{"calculus", "garding", "garding-"}}},
      {"framing sandwich",
       {{"harmonic", "weyl-sweep", "framing-"}, {"rough_weyl", "weyl-sweep", "framing-"},
        {"rough_riesz", "weyl-sweep", "framing-"}}},
      {"stationary phase", {{"calculus", "stationary-phase", "stationary-"}}},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [title, picks] = criteria[i];
    bool pass = true;
    std::vector<std::string> detail;
    for (const auto& s : picks) {
      const SuiteResult& r = run.get(s.scenario, s.suite);
      int matched = 0;
      for (const auto& c : r.criteria) {
        if (c.name.rfind(s.prefix, 0) != 0 && c.name != "suite-error") continue;
        ++matched;
        pass = pass && c.pass;
        detail.push_back(s.scenario + "/" + describe(c));
      }
      if (matched == 0) {
        pass = false;
        detail.push_back(s.scenario + "/" + s.suite + ": no criterion '" + s.prefix + "'");
      }
    }
    if (!pass) ++failed;
    std::string line = std::string(pass ? "PASS" : "FAIL") + " [" + std::to_string(i + 1) + "] " + title;
    for (const auto& d : detail) line += "\n       " + d;
    std::cout << line << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
