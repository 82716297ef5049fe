#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lossperc/record.hpp"

namespace lossperc {

struct BinomialOptions {
  enum class Method { automatic, exact, gaussian };
  /// Terms below this fraction of the modal weight are dropped.
  double truncation = 1e-12;
  /// `automatic` switches to the Gaussian form above this N.
  std::size_t gaussian_cutoff = 10'000'000;
  Method method = Method::automatic;
};

/// Binomial(N, p) probabilities on the retained support [first, first + size).
struct BinomialWeights {
  std::size_t first = 0;
  std::vector<double> values;

  double at(std::size_t i) const {
    return i < first || i >= first + values.size() ? 0.0 : values[i - first];
  }
};

/// Normalised binomial weights, built outward from the mode by the ratio
/// recurrence (mode weight 1, then normalised to unit sum).
BinomialWeights binomial_weights(std::size_t n, double p, const BinomialOptions& options = {});
/// Weights for every grid point.
std::vector<BinomialWeights> binomial_weights(std::size_t n, std::span<const double> grid,
                                              const BinomialOptions& options = {});

/// Sum of record[i] * w_i over the retained support. record.size() must be N + 1.
template <class T>
double convolve_at(std::span<const T> record, const BinomialWeights& w) {
  // Four partial sums keep the adds from forming one serial chain.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const T* base = record.data() + w.first;
  const double* v = w.values.data();
  const std::size_t n = w.values.size();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    for (std::size_t j = 0; j < 4; ++j) acc[j] += static_cast<double>(base[k + j]) * v[k + j];
  }
  for (; k < n; ++k) acc[0] += static_cast<double>(base[k]) * v[k];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

/// Canonical-ensemble curve on a grid of occupation (or efficiency) values.
/// The error arrays (standard errors) are empty when no error estimate is available.
struct CanonicalCurve {
  std::vector<double> p;
  std::vector<double> mean_largest;
  std::vector<double> span_probability;
  std::vector<double> largest_error;
  std::vector<double> span_error;

  std::size_t size() const { return p.size(); }
  bool has_errors() const { return !largest_error.empty(); }
};

/// Microcanonical-to-canonical transform of one record (N = size - 1).
std::vector<double> convolve(std::span<const double> record, std::span<const double> grid,
                             const BinomialOptions& options = {});

/// Transforms mean largest-size and spanning records sharing one N.
CanonicalCurve convolve(std::span<const double> mean_largest, std::span<const double> span_probability,
                        std::span<const double> grid, const BinomialOptions& options = {});

/// Variable photon count: each run is transformed with its own N and the
/// curves are averaged afterwards. Standard errors come from the run spread.
CanonicalCurve convolve_model3(std::span<const SweepRecord> runs, std::span<const double> grid,
                               const BinomialOptions& options = {});

struct ThresholdEstimate {
  double value = 0.0;
  double error = 0.0;
  std::size_t runs = 0;
  std::size_t spanned = 0;

  bool all_spanned() const { return spanned == runs; }
  bool valid() const { return spanned >= 1; }
};

/// Mean spanning-onset fraction i*/T over runs, with the standard error of
/// the mean. Runs that never span are counted but excluded from the mean;
/// when none span the estimate is flagged invalid.
ThresholdEstimate estimate_threshold(std::span<const std::optional<std::size_t>> onsets,
                                     std::span<const std::size_t> photons);
ThresholdEstimate estimate_threshold(std::span<const double> onset_fractions);

struct SizeThreshold {
  double size = 0.0;
  double value = 0.0;
  double error = 0.0;
};

enum class FitMode { free_exponent, fixed_exponent };
std::string to_string(FitMode mode);

struct ExtrapolationOptions {
  /// Exponent used by the fixed mode, lambda(L) = lambda_inf + a / L^exponent.
  double fixed_exponent = 1.0;
  double min_exponent = 0.2;
  double max_exponent = 4.0;
  bool allow_free = true;
};

struct Extrapolation {
  double value = 0.0;
  double error = 0.0;
  double amplitude = 0.0;
  double exponent = 1.0;
  FitMode mode = FitMode::fixed_exponent;
  double chi2 = 0.0;
  std::size_t sizes = 0;
  std::string note;
};

/// Weighted least-squares fit of lambda(L) = lambda_inf + a L^(-1/nu).
/// The exponent is fitted when at least four sizes are given and the fit is
/// well conditioned; otherwise it is fixed (1 by default). Needs three
/// distinct sizes.
Extrapolation extrapolate(std::span<const SizeThreshold> per_size, const ExtrapolationOptions& options = {});

}  // namespace lossperc
