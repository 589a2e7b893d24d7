#pragma once

// Named verification suites run by the CLI, with JSON and CSV writers.

#include <cstdint>
#include <string>
#include <vector>

#include "kober/montecarlo.hpp"

namespace kober {

struct SuiteCase {
  std::string id;
  std::string paper_ref;  // short description of the identity being checked
  double expected = 0.0;
  double got = 0.0;
  double se = 0.0;   // 0 for deterministic cases
  double tol = 0.0;  // absolute: pass iff |got - expected| <= tol
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  std::uint64_t seed = kDefaultSeed;
  std::vector<SuiteCase> cases;
  double elapsed_ms = 0.0;

  bool all_pass() const;
};

struct SuiteOptions {
  int p = 1;
  std::uint64_t seed = kDefaultSeed;
  /// 0 selects the suite's own sample size.
  std::size_t n_samples = 0;
};

const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

/// Throws InvalidArgument for an unknown suite or an unsupported p.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opt);

/// Numbers are rounded to 12 significant digits; elapsed_ms only when timing is set.
std::string to_json(const SuiteResult& r, bool timing = false);
/// Header id,paper_ref,expected,got,se,tol,pass (RFC 4180 quoting).
std::string to_csv(const SuiteResult& r);

/// Appends a case; pass is computed from |got - expected| <= tol.
void add_case(SuiteResult& r, std::string id, std::string ref, double expected, double got, double se, double tol);

std::string format12(double x);
std::string csv_field(const std::string& s);

}  // namespace kober
