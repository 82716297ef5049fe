// Acceptance runner: one PASS/FAIL line per primary criterion. Tolerances
// live in the verification checks (src/verification.cpp) and are printed in
// each detail string.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "lossperc/verification.hpp"

using namespace lossperc;

namespace {

struct Criterion {
  const char* label;
  std::vector<const char*> checks;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"square-lattice bond threshold", {"square_bond_threshold"}},
      {"simple-cubic bond threshold", {"cubic_bond_threshold"}},
      {"generalized-diamond bond thresholds (d=2, d=3)", {"diamond_bond_thresholds"}},
      {"RHG bond and site thresholds", {"rhg_thresholds"}},
      {"model 3 (n_max=1) equals model 2'", {"model3_model2prime_equivalence"}},
      {"oracle equivalence (Monte Carlo and exhaustive)", {"oracle_equivalence", "exhaustive_equivalence"}},
      {"fusion outcome identities and presample frequencies", {"adaptive_identities"}},
      {"monotonicity and label consistency", {"monotonicity"}},
      {"runtime scaling", {"runtime_scaling"}},
      {"determinism across worker counts", {"determinism"}},
  };

  SuiteOptions options;
  options.scratch_dir = (std::filesystem::temp_directory_path() / "lossperc_acceptance").string();
  std::filesystem::create_directories(options.scratch_dir);

  int failed = 0;
  for (const auto& c : criteria) {
    bool pass = true;
    std::string detail;
    double seconds = 0.0;
    for (const char* name : c.checks) {
      CheckResult r;
      try {
        r = run_check(name, options);
      } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
      }
      pass = pass && r.pass;
      seconds += r.seconds;
      if (!detail.empty()) detail += " | ";
      detail += std::string(name) + ": " + r.detail;
    }
    if (!pass) ++failed;
    std::printf("%s %s (%.1f s): %s\n", pass ? "PASS" : "FAIL", c.label, seconds, detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
