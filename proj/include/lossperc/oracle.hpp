#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lossperc/lattice.hpp"
#include "lossperc/models.hpp"
#include "lossperc/rng.hpp"
#include "lossperc/statistics.hpp"

// Reference implementations that do not use the photon-by-photon update
// rules: a whole configuration of photon losses and fusion outcomes is
// drawn (or enumerated), the deletion rules are applied to it at once, and
// components are found by breadth-first search.

namespace lossperc {

struct OracleSample {
  std::size_t largest = 0;
  bool spanning = false;
};

/// Fusion outcome of one edge in a whole configuration. For the bond model
/// `success` means the bond is present.
enum class FusionOutcome : std::uint8_t { lost, failed, success };

struct Configuration {
  /// Qubit (model1, site) or central photon (model2) present. Ignored by the
  /// models without lossy centres.
  std::vector<std::uint8_t> node_present;
  std::vector<FusionOutcome> edge;
};

/// Applies the deletion rules for `model` to a configuration and measures
/// the largest surviving component and spanning.
OracleSample evaluate(const Lattice& lattice, Model model, const Configuration& config);

/// Draws one canonical configuration at photon efficiency (or occupation
/// probability) eta and evaluates it. Repeat-until-success fusions are
/// simulated attempt by attempt.
OracleSample canonical_sample(const Lattice& lattice, const ModelParams& params, double eta, Rng& rng);

/// Monte Carlo canonical curve: `samples` independent samples per grid
/// point, with standard errors (adjusted Wald form for the spanning
/// probability). Grid point g uses seed + g.
CanonicalCurve canonical_curve(const Lattice& lattice, const ModelParams& params, std::span<const double> grid,
                               std::size_t samples, std::uint64_t seed);

/// Largest photon pool the exhaustive enumerator accepts.
inline constexpr std::size_t kExhaustiveMaxPhotons = 22;

/// Exact canonical curve by summing over every loss pattern and fusion
/// outcome with its probability. Throws std::invalid_argument when the pool
/// (the largest possible pool for model3/boosted) exceeds the cap.
CanonicalCurve exhaustive_curve(const Lattice& lattice, const ModelParams& params, std::span<const double> grid);

struct Tolerance {
  enum class Kind { absolute, sigma };
  Kind kind = Kind::absolute;
  /// Absolute bound, or the number of combined standard errors.
  double value = 1e-10;
  /// Lower bounds on the allowed deviation in sigma mode, for points where
  /// both curves are deterministic up to rounding.
  double span_floor = 0.0;
  double largest_floor = 0.0;
  /// When false only the spanning probability is judged.
  bool check_largest = true;
};

struct PointDeviation {
  double p = 0.0;
  double largest_diff = 0.0;
  double span_diff = 0.0;
  double largest_allowed = 0.0;
  double span_allowed = 0.0;
  bool pass = true;
};

struct ComparisonReport {
  bool pass = true;
  std::vector<PointDeviation> points;
  /// Largest absolute difference over both quantities.
  double max_deviation = 0.0;
  /// Point with the largest difference relative to its allowance.
  std::size_t worst_index = 0;
  std::string worst_quantity;

  std::string summary() const;
};

/// Pointwise comparison of mean largest size and spanning probability.
/// Throws std::invalid_argument when the grids differ.
ComparisonReport compare(const CanonicalCurve& a, const CanonicalCurve& b, const Tolerance& tolerance);

}  // namespace lossperc
