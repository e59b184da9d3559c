#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace itrain {

// One acceptance check: `value` is the measured quantity, compared against
// `threshold` under `relation` ("<=", ">=", or "==").
struct CriterionResult {
  std::string id;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation = "<=";
  bool pass = false;
  std::string note;
};

struct ValidationOptions {
  // Scales Monte Carlo trial counts; 1.0 = the full pinned counts. Values
  // below 1 are for quick smoke runs only and loosen nothing else.
  double trial_scale = 1.0;
  int threads = 1;
  bool verbose = false;  // progress notes to stderr
};

std::vector<CriterionResult> run_validation(const ValidationOptions& options = {});

// "<id>,<value>,<threshold>,<relation>,<PASS|FAIL>  <note>" per line plus a
// summary; returns true when every criterion passed.
bool print_validation_report(const std::vector<CriterionResult>& results, std::ostream& out);

}  // namespace itrain
