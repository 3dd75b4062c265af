#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Built-in verification suite: eleven self-contained checks anchored to the
// model's analytic statements (empty-cavity decay, lineshape universality,
// pump formula, free-space emission, stage-2 closed forms and sum rule,
// detailed balance, the explicit-phonon oracle, mean-field validity,
// thermalization, threshold phenomenology, state health). `pbec verify`
// and the acceptance test binary both run this.
namespace pbec::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;   // measured numbers vs tolerance
  double runtime_s = 0.0;
  double budget_s = 0.0;  // 0 = no stated budget
};

struct Options {
  // Fault-injection hook: flips the sign of kappa inside criterion 1's
  // superoperator; the decay check must then fail (mutation sanity).
  bool inject_kappa_sign_flip = false;
  // Run a single criterion (1..11); 0 runs all.
  int only = 0;
};

struct Report {
  std::vector<CriterionResult> results;
  bool all_pass = false;
};

Report run_all(const Options& opts = {}, std::ostream* progress = nullptr);

std::string to_json(const Report& report);

}  // namespace pbec::acceptance
