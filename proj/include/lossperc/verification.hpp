#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lossperc/lattice.hpp"
#include "lossperc/models.hpp"
#include "lossperc/statistics.hpp"

namespace lossperc {

/// Exact microcanonical curve: averages the sweep trajectories over every
/// permutation of the photon pool and every fusion-outcome sequence (and
/// every presample for model3/boosted) with their exact weights, then
/// applies the binomial transform. Uses the photon-by-photon update rules.
/// Throws std::invalid_argument for pools above `max_photons`.
CanonicalCurve exact_microcanonical_curve(const Lattice& lattice, const ModelParams& params,
                                          std::span<const double> grid, std::size_t max_photons = 10);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteOptions {
  /// Multiplies repetition and sample counts; 1 is the full acceptance scale.
  double scale = 1.0;
  /// Fault injection: drop one edge from every lattice the structure check builds.
  bool corrupt_lattice = false;
  unsigned workers = 0;
  std::uint64_t seed = 20240601;
  /// Scratch directory for checks that write files.
  std::string scratch_dir;
};

/// Suites: lattices, oracle, identities, monotonicity, determinism, runtime,
/// and default (everything).
std::vector<std::string> suite_names();
/// Throws std::invalid_argument for an unknown suite.
std::vector<std::string> suite_checks(const std::string& suite);
std::vector<std::string> check_names();

/// Throws std::invalid_argument for an unknown check.
CheckResult run_check(const std::string& name, const SuiteOptions& options);

std::vector<CheckResult> run_suite(const std::string& suite, const SuiteOptions& options,
                                   const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace lossperc
