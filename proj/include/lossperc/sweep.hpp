#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "lossperc/lattice.hpp"
#include "lossperc/models.hpp"
#include "lossperc/record.hpp"
#include "lossperc/rng.hpp"
#include "lossperc/statistics.hpp"

namespace lossperc {

/// Reusable per-worker sweep machinery: one model instance plus the photon
/// pool buffer. Per sweep the generator is used for the presample (model3,
/// boosted), then the pool shuffle, then the fusion draws made while adding.
class Sweeper {
 public:
  Sweeper(const Lattice& lattice, const ModelParams& params) : state_(lattice, params) {}

  /// Runs one sweep. `observe(i, state)` is called for i = 0 (before any
  /// photon) and after every added photon. Returns the pool size T.
  template <class Observer>
  std::size_t run(std::uint64_t seed, Observer&& observe) {
    Rng rng(seed);
    std::size_t total;
    if (state_.needs_presample()) {
      total = state_.presample(rng);
    } else {
      state_.reset();
      total = state_.photon_count();
    }
    pool_.resize(total);
    std::iota(pool_.begin(), pool_.end(), std::uint32_t{0});
    shuffle(std::span<std::uint32_t>(pool_), rng);
    observe(std::size_t{0}, static_cast<const PercolationState&>(state_));
    const std::uint32_t* pool = pool_.data();
    const std::size_t stages = state_.needs_presample() ? 5 : 4;
    for (std::size_t i = 0; i < total; ++i) {
      for (std::size_t s = 0; s < stages; ++s) {
        const std::size_t ahead = i + kPrefetchDistance[s + 5 - stages];
        if (ahead < total) state_.prefetch(pool[ahead], static_cast<int>(s));
      }
      state_.add_photon(pool[i], rng);
      observe(i + 1, static_cast<const PercolationState&>(state_));
    }
    return total;
  }

  SweepRecord record(std::uint64_t seed);

  const PercolationState& state() const { return state_; }

 private:
  // Look-ahead per prefetch stage, earliest stage first.
  static constexpr std::size_t kPrefetchDistance[5] = {48, 36, 24, 12, 5};

  PercolationState state_;
  std::vector<std::uint32_t> pool_;
};

/// One microcanonical sweep with its largest-size and spanning trajectories.
SweepRecord run_sweep(const Lattice& lattice, const ModelParams& params, std::uint64_t seed);

/// Aggregate of `repetitions` sweeps with seeds base_seed + r.
struct EnsembleRecord {
  std::size_t repetitions = 0;
  std::uint64_t base_seed = 0;
  /// Pool size when it is the same for every run, 0 otherwise.
  std::size_t total_photons = 0;
  /// <S(i)> and spanning probability at i (fixed photon count only).
  std::vector<double> mean_largest;
  std::vector<double> span_probability;
  /// Per-run spanning onset and pool size, by run index.
  std::vector<std::optional<std::size_t>> onsets;
  std::vector<std::size_t> photons;
  /// Full per-run records, kept only when the photon count varies.
  std::vector<SweepRecord> runs;

  ThresholdEstimate threshold() const { return estimate_threshold(onsets, photons); }
};

/// `workers` = 0 uses the available hardware parallelism. The result does
/// not depend on the worker count.
EnsembleRecord run_ensemble(const Lattice& lattice, const ModelParams& params, std::size_t repetitions,
                            std::uint64_t base_seed, unsigned workers = 0);

/// Canonical curve with standard errors plus onset data, computed by
/// transforming every run separately and averaging the curves in run order.
/// Per-run records are discarded as soon as they are transformed.
struct CanonicalEnsemble {
  CanonicalCurve curve;
  std::vector<std::optional<std::size_t>> onsets;
  std::vector<std::size_t> photons;
  std::size_t photons_total = 0;

  ThresholdEstimate threshold() const { return estimate_threshold(onsets, photons); }
};

CanonicalEnsemble canonical_ensemble(const Lattice& lattice, const ModelParams& params, std::size_t repetitions,
                                     std::uint64_t base_seed, std::span<const double> grid, unsigned workers = 0,
                                     const BinomialOptions& options = {});

/// Resolves 0 to the hardware concurrency (at least 1).
unsigned resolve_workers(unsigned workers);

}  // namespace lossperc
