#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "semiweyl/errors.hpp"
#include "semiweyl/numerics.hpp"
#include "semiweyl/scenario.hpp"
#include "semiweyl/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace semiweyl;

namespace {

// JSON has no inf/nan; those are written as strings.
ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

ordered_json criterion_json(const Criterion& c) {
  ordered_json j;
  j["name"] = c.name;
  j["value"] = number(c.value);
  j["relation"] = c.relation;
  j["threshold"] = number(c.threshold);
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int run(const std::string& config, std::vector<std::string> suites, const std::string& out_dir, bool strict,
        int threads) {
  Scenario sc;
  try {
    sc = load_scenario(config);
  } catch (const ParseError& e) {
    std::cerr << "semiweyl: parse error: " << e.what() << "\n";
    return 2;
  }
  if (suites.empty()) suites = sc.suites;
  if (suites.empty()) {
    std::cerr << "semiweyl: no suites requested (set 'suites' in [scenario] or pass --suite)\n";
    return 2;
  }
  for (const auto& s : suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
      std::cerr << "semiweyl: unknown suite '" << s << "'\n";
      return 2;
    }

  SuiteOptions opt;
  opt.threads = resolve_threads(threads);
  opt.strict = strict;
  fs::create_directories(out_dir);

  ordered_json report;
  report["scenario"] = sc.name;
  report["suite"] = suites;
  report["slopes"] = ordered_json::object();
  report["tolerances"] = ordered_json::object();
  report["pass"] = true;
  report["criteria"] = ordered_json::object();
  std::vector<std::string> failures;

  for (const auto& name : suites) {
    SuiteResult r;
    r.suite = name;
    try {
      r = run_suite(sc, name, opt);
    } catch (const ParseError& e) {
      std::cerr << "semiweyl: parse error: " << e.what() << "\n";
      return 2;
    } catch (const Error& e) {
      r.criteria.push_back({"suite-error", 0.0, 0.0, "==", false, e.what()});
    }
    for (const auto& t : r.tables) write_file(fs::path(out_dir) / (sc.name + "_" + t.name + ".csv"), t.csv());
    ordered_json slopes = ordered_json::object(), tols = ordered_json::object(), crit = ordered_json::array();
    for (const auto& [k, v] : r.slopes) slopes[k] = number(v);
    for (const auto& [k, v] : r.tolerances) tols[k] = number(v);
    for (const auto& c : r.criteria) {
      crit.push_back(criterion_json(c));
      if (!c.pass) failures.push_back(name + "/" + c.name);
    }
    report["slopes"][name] = slopes;
    report["tolerances"][name] = tols;
    report["criteria"][name] = crit;
    std::cout << (r.pass() ? "PASS " : "FAIL ") << name << "\n";
    for (const auto& c : r.criteria)
      std::cout << "  " << (c.pass ? "ok   " : "FAIL ") << c.name << ": " << format_number(c.value) << " "
                << c.relation << " " << format_number(c.threshold) << (c.note.empty() ? "" : "  (" + c.note + ")")
                << "\n";
  }
  report["pass"] = failures.empty();
  report["failed"] = failures;
  write_file(fs::path(out_dir) / (sc.name + "_report.json"), report.dump(2) + "\n");
  if (!failures.empty()) {
    for (const auto& f : failures) std::cerr << "semiweyl: criterion failed: " << f << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical spectral validation driver"};
  app.require_subcommand(1);
  auto* run_cmd = app.add_subcommand("run", "Run the validation suites of a scenario");
  std::string config, out_dir = ".";
  std::vector<std::string> suites;
  bool strict = false;
  int threads = 0;
  run_cmd->add_option("config", config, "Scenario file")->required();
  run_cmd->add_option("--suite", suites, "Suite to run (repeatable); defaults to the scenario's list");
  run_cmd->add_option("--out", out_dir, "Output directory for CSV tables and the JSON report");
  run_cmd->add_flag("--strict", strict, "Treat aliasing and Nyquist warnings as errors");
  run_cmd->add_option("--threads", threads, "Worker threads (default: SEMIWEYL_THREADS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run(config, suites, out_dir, strict, threads);
  } catch (const std::exception& e) {
    std::cerr << "semiweyl: " << e.what() << "\n";
    return 1;
  }
}
