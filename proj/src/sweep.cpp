#include "lossperc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace lossperc {

namespace {

// Calls body(worker, index) for every index in [0, count) on `workers`
// threads. Indices are handed out dynamically; callers must store results by
// index so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(count, 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(0u, i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(w, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double error_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

}  // namespace

unsigned resolve_workers(unsigned workers) {
  if (workers != 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepRecord Sweeper::record(std::uint64_t seed) {
  SweepRecord r;
  r.seed = seed;
  r.total_photons = run(seed, [&](std::size_t i, const PercolationState& s) {
    r.largest.push_back(static_cast<std::uint32_t>(s.largest()));
    r.spanning.push_back(s.spanning() ? 1 : 0);
    if (!r.onset && s.spanning()) r.onset = i;
  });
  return r;
}

SweepRecord run_sweep(const Lattice& lattice, const ModelParams& params, std::uint64_t seed) {
  Sweeper sweeper(lattice, params);
  return sweeper.record(seed);
}

EnsembleRecord run_ensemble(const Lattice& lattice, const ModelParams& params, std::size_t repetitions,
                            std::uint64_t base_seed, unsigned workers) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (repetitions > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("too many repetitions");
  params.check();
  workers = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(std::min<std::size_t>(repetitions, 1u << 16)));

  EnsembleRecord out;
  out.repetitions = repetitions;
  out.base_seed = base_seed;
  out.onsets.resize(repetitions);
  out.photons.resize(repetitions);
  const bool variable = params.variable_photon_count();
  if (variable) out.runs.resize(repetitions);

  std::vector<Sweeper> sweepers;
  sweepers.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) sweepers.emplace_back(lattice, params);

  // Integer sums per worker: merging them is exact and order independent.
  const std::size_t total = variable ? 0 : sweepers.front().state().photon_count();
  std::vector<std::vector<std::uint64_t>> sum_largest(variable ? 0 : workers);
  std::vector<std::vector<std::uint32_t>> sum_span(variable ? 0 : workers);

  parallel_for(repetitions, workers, [&](unsigned w, std::size_t r) {
    const std::uint64_t seed = base_seed + r;
    if (variable) {
      SweepRecord rec = sweepers[w].record(seed);
      out.onsets[r] = rec.onset;
      out.photons[r] = rec.total_photons;
      out.runs[r] = std::move(rec);
      return;
    }
    auto& s = sum_largest[w];
    auto& b = sum_span[w];
    if (s.empty()) {
      s.assign(total + 1, 0);
      b.assign(total + 1, 0);
    }
    std::optional<std::size_t> onset;
    sweepers[w].run(seed, [&](std::size_t i, const PercolationState& st) {
      s[i] += st.largest();
      if (st.spanning()) {
        ++b[i];
        if (!onset) onset = i;
      }
    });
    out.onsets[r] = onset;
    out.photons[r] = total;
  });

  if (!variable) {
    out.total_photons = total;
    // Fold every worker's sums into the first one that ran a sweep.
    unsigned first = 0;
    while (sum_largest[first].empty()) ++first;
    auto& s = sum_largest[first];
    auto& b = sum_span[first];
    for (unsigned w = first + 1; w < workers; ++w) {
      if (sum_largest[w].empty()) continue;
      for (std::size_t i = 0; i <= total; ++i) {
        s[i] += sum_largest[w][i];
        b[i] += sum_span[w][i];
      }
      std::vector<std::uint64_t>().swap(sum_largest[w]);
      std::vector<std::uint32_t>().swap(sum_span[w]);
    }
    const double inv = 1.0 / static_cast<double>(repetitions);
    out.mean_largest.resize(total + 1);
    out.span_probability.resize(total + 1);
    for (std::size_t i = 0; i <= total; ++i) {
      out.mean_largest[i] = static_cast<double>(s[i]) * inv;
      out.span_probability[i] = static_cast<double>(b[i]) * inv;
    }
  }
  return out;
}

CanonicalEnsemble canonical_ensemble(const Lattice& lattice, const ModelParams& params, std::size_t repetitions,
                                     std::uint64_t base_seed, std::span<const double> grid, unsigned workers,
                                     const BinomialOptions& options) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (grid.empty()) throw std::invalid_argument("grid must not be empty");
  params.check();
  workers = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(std::min<std::size_t>(repetitions, 1u << 16)));
  const bool variable = params.variable_photon_count();

  std::vector<Sweeper> sweepers;
  sweepers.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) sweepers.emplace_back(lattice, params);

  std::vector<BinomialWeights> fixed_weights;
  if (!variable) {
    const std::size_t total = sweepers.front().state().photon_count();
    fixed_weights = binomial_weights(total, grid, options);
  }

  const std::size_t g_count = grid.size();
  std::vector<std::vector<double>> s(g_count, std::vector<double>(repetitions));
  std::vector<std::vector<double>> b(g_count, std::vector<double>(repetitions));
  CanonicalEnsemble out;
  out.onsets.resize(repetitions);
  out.photons.resize(repetitions);

  parallel_for(repetitions, workers, [&](unsigned w, std::size_t r) {
    const SweepRecord rec = sweepers[w].record(base_seed + r);
    out.onsets[r] = rec.onset;
    out.photons[r] = rec.total_photons;
    std::vector<BinomialWeights> own;
    if (variable) own = binomial_weights(rec.total_photons, grid, options);
    for (std::size_t g = 0; g < g_count; ++g) {
      const BinomialWeights& weights = variable ? own[g] : fixed_weights[g];
      s[g][r] = convolve_at(std::span<const std::uint32_t>(rec.largest), weights);
      b[g][r] = convolve_at(std::span<const std::uint8_t>(rec.spanning), weights);
    }
  });

  out.curve.p.assign(grid.begin(), grid.end());
  for (std::size_t g = 0; g < g_count; ++g) {
    const double ms = mean_of(s[g]);
    const double mb = mean_of(b[g]);
    out.curve.mean_largest.push_back(ms);
    out.curve.span_probability.push_back(mb);
    out.curve.largest_error.push_back(error_of(s[g], ms));
    out.curve.span_error.push_back(error_of(b[g], mb));
  }
  for (std::size_t t : out.photons) out.photons_total += t;
  return out;
}

}  // namespace lossperc
