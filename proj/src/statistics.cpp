#include "lossperc/statistics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lossperc {

namespace {

BinomialWeights point_mass(std::size_t at) { return {at, {1.0}}; }

double sum_of(const std::vector<double>& xs) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + 4 <= xs.size(); k += 4) {
    for (int j = 0; j < 4; ++j) acc[j] += xs[k + j];
  }
  for (; k < xs.size(); ++k) acc[0] += xs[k];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

// Appends w_k = prod_{j<=k} (num - j) * ratio / (den + j) for k = 0, 1, ...
// while w_k >= truncation, at most `steps` terms.
void append_tail(std::vector<double>& v, std::size_t steps, double num, double den, double ratio,
                 double truncation) {
  std::size_t k = v.size();
  const std::size_t end = k + steps;
  double w = 1.0;
  while (k < end) {
    v.resize(std::min(end, k + std::max<std::size_t>(k, 256)));
    double* out = v.data();
    for (const std::size_t stop = v.size(); k < stop; ++k) {
      w *= num * ratio / den;
      if (w < truncation) {
        v.resize(k);
        return;
      }
      out[k] = w;
      num -= 1.0;
      den += 1.0;
    }
  }
}

BinomialWeights exact_weights(std::size_t n, double p, double truncation) {
  const auto mode = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor((n + 1) * p)));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(mode);
  BinomialWeights out;
  auto& v = out.values;
  // Below the mode first (built outward, then reversed), then the mode and above.
  append_tail(v, mode, dm, dn - dm + 1.0, (1.0 - p) / p, truncation);
  std::reverse(v.begin(), v.end());
  out.first = mode - v.size();
  v.push_back(1.0);
  append_tail(v, n - mode, dn - dm, dm + 1.0, p / (1.0 - p), truncation);
  return out;
}

BinomialWeights gaussian_weights(std::size_t n, double p, double truncation) {
  const double mean = static_cast<double>(n) * p;
  const double sigma = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  const double reach = std::sqrt(-2.0 * std::log(truncation)) * sigma;
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(mean - reach)));
  const auto hi = static_cast<std::size_t>(std::min(static_cast<double>(n), std::floor(mean + reach)));
  BinomialWeights out;
  out.first = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double z = (static_cast<double>(i) - mean) / sigma;
    out.values.push_back(std::exp(-0.5 * z * z));
  }
  return out;
}

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Sample standard deviation divided by sqrt(count).
double standard_error(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_var = 0.0;
  double chi2 = 0.0;
  bool ok = false;
};

LinearFit weighted_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  LinearFit f;
  const double det = s * sxx - sx * sx;
  if (!(std::abs(det) > 1e-300)) return f;
  f.intercept = (sxx * sy - sx * sxy) / det;
  f.slope = (s * sxy - sx * sy) / det;
  f.intercept_var = sxx / det;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.chi2 += w[i] * r * r;
  }
  f.ok = true;
  return f;
}

// Inverse of a symmetric 3x3 matrix; returns false when singular.
bool invert3(const std::array<std::array<double, 3>, 3>& a, std::array<std::array<double, 3>, 3>& inv) {
  const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
  const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
  const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
  if (!(std::abs(det) > 1e-300)) return false;
  inv[0][0] = c00 / det;
  inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  inv[1][0] = c01 / det;
  inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  inv[2][0] = c02 / det;
  inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return true;
}

}  // namespace

namespace {

void check_binomial_args(double p, const BinomialOptions& options) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial probability must lie in [0, 1]");
  if (!(options.truncation > 0.0 && options.truncation < 1.0)) {
    throw std::invalid_argument("truncation must lie in (0, 1)");
  }
}

bool use_gaussian(std::size_t n, double p, const BinomialOptions& options) {
  const bool gaussian = options.method == BinomialOptions::Method::gaussian ||
                        (options.method == BinomialOptions::Method::automatic && n > options.gaussian_cutoff);
  // A Gaussian narrower than one lattice step is meaningless.
  return gaussian && static_cast<double>(n) * p * (1.0 - p) >= 1.0;
}

BinomialWeights weights_with(std::size_t n, double p, const BinomialOptions& options) {
  check_binomial_args(p, options);
  if (p == 0.0 || n == 0) return point_mass(0);
  if (p == 1.0) return point_mass(n);
  BinomialWeights w = use_gaussian(n, p, options) ? gaussian_weights(n, p, options.truncation)
                                                  : exact_weights(n, p, options.truncation);
  const double scale = 1.0 / sum_of(w.values);
  for (double& v : w.values) v *= scale;
  return w;
}

}  // namespace

BinomialWeights binomial_weights(std::size_t n, double p, const BinomialOptions& options) {
  return weights_with(n, p, options);
}

std::vector<BinomialWeights> binomial_weights(std::size_t n, std::span<const double> grid,
                                              const BinomialOptions& options) {
  std::vector<BinomialWeights> out;
  out.reserve(grid.size());
  for (double p : grid) out.push_back(weights_with(n, p, options));
  return out;
}

std::vector<double> convolve(std::span<const double> record, std::span<const double> grid,
                             const BinomialOptions& options) {
  if (record.empty()) throw std::invalid_argument("empty record");
  const std::size_t n = record.size() - 1;
  std::vector<double> out;
  out.reserve(grid.size());
  for (double p : grid) out.push_back(convolve_at(record, binomial_weights(n, p, options)));
  return out;
}

CanonicalCurve convolve(std::span<const double> mean_largest, std::span<const double> span_probability,
                        std::span<const double> grid, const BinomialOptions& options) {
  if (mean_largest.size() != span_probability.size()) {
    throw std::invalid_argument("record length mismatch");
  }
  if (mean_largest.empty()) throw std::invalid_argument("empty record");
  const std::size_t n = mean_largest.size() - 1;
  CanonicalCurve c;
  c.p.assign(grid.begin(), grid.end());
  for (double p : grid) {
    const auto w = binomial_weights(n, p, options);
    c.mean_largest.push_back(convolve_at(mean_largest, w));
    c.span_probability.push_back(convolve_at(span_probability, w));
  }
  return c;
}

CanonicalCurve convolve_model3(std::span<const SweepRecord> runs, std::span<const double> grid,
                               const BinomialOptions& options) {
  if (runs.empty()) throw std::invalid_argument("no runs to convolve");
  const std::size_t r = runs.size();
  std::vector<std::vector<double>> s(grid.size(), std::vector<double>(r));
  std::vector<std::vector<double>> b(grid.size(), std::vector<double>(r));
  for (std::size_t k = 0; k < r; ++k) {
    const auto& run = runs[k];
    if (run.largest.size() != run.total_photons + 1 || run.spanning.size() != run.largest.size()) {
      throw std::invalid_argument("malformed sweep record");
    }
    const auto weights = binomial_weights(run.total_photons, grid, options);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto& w = weights[g];
      s[g][k] = convolve_at(std::span<const std::uint32_t>(run.largest), w);
      b[g][k] = convolve_at(std::span<const std::uint8_t>(run.spanning), w);
    }
  }
  CanonicalCurve c;
  c.p.assign(grid.begin(), grid.end());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    c.mean_largest.push_back(mean_of(s[g]));
    c.span_probability.push_back(mean_of(b[g]));
    c.largest_error.push_back(standard_error(s[g]));
    c.span_error.push_back(standard_error(b[g]));
  }
  return c;
}

ThresholdEstimate estimate_threshold(std::span<const double> fractions) {
  if (fractions.size() < 2) throw std::invalid_argument("threshold estimate needs at least two runs");
  ThresholdEstimate t;
  t.runs = t.spanned = fractions.size();
  t.value = mean_of(fractions);
  t.error = standard_error(fractions);
  return t;
}

ThresholdEstimate estimate_threshold(std::span<const std::optional<std::size_t>> onsets,
                                     std::span<const std::size_t> photons) {
  if (onsets.size() != photons.size()) throw std::invalid_argument("onset/photon count mismatch");
  if (onsets.size() < 2) throw std::invalid_argument("threshold estimate needs at least two runs");
  std::vector<double> fractions;
  for (std::size_t k = 0; k < onsets.size(); ++k) {
    if (!onsets[k]) continue;
    fractions.push_back(photons[k] == 0 ? 0.0
                                        : static_cast<double>(*onsets[k]) / static_cast<double>(photons[k]));
  }
  ThresholdEstimate t;
  t.runs = onsets.size();
  t.spanned = fractions.size();
  if (fractions.empty()) {
    t.value = t.error = std::numeric_limits<double>::quiet_NaN();
    return t;
  }
  t.value = mean_of(fractions);
  t.error = standard_error(fractions);
  return t;
}

std::string to_string(FitMode mode) { return mode == FitMode::free_exponent ? "free" : "fixed"; }

Extrapolation extrapolate(std::span<const SizeThreshold> per_size, const ExtrapolationOptions& options) {
  std::vector<double> sizes;
  for (const auto& s : per_size) {
    if (!(s.size > 0.0)) throw std::invalid_argument("sizes must be positive");
    sizes.push_back(s.size);
  }
  std::sort(sizes.begin(), sizes.end());
  if (std::unique(sizes.begin(), sizes.end()) - sizes.begin() < 3) {
    throw std::invalid_argument("extrapolation needs at least three distinct sizes");
  }
  const std::size_t n = per_size.size();
  std::vector<double> y(n), w(n), x(n);
  const bool weighted = std::all_of(per_size.begin(), per_size.end(), [](const auto& s) { return s.error > 0.0; });
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = per_size[i].value;
    w[i] = weighted ? 1.0 / (per_size[i].error * per_size[i].error) : 1.0;
  }
  auto fit_at = [&](double theta) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(per_size[i].size, -theta);
    return weighted_line(x, y, w);
  };

  Extrapolation out;
  out.sizes = n;

  auto fixed = [&](std::string note) {
    const LinearFit f = fit_at(options.fixed_exponent);
    if (!f.ok) throw std::runtime_error("extrapolation fit is singular");
    out.mode = FitMode::fixed_exponent;
    out.exponent = options.fixed_exponent;
    out.value = f.intercept;
    out.amplitude = f.slope;
    out.chi2 = f.chi2;
    double var = f.intercept_var;
    if (!weighted) var *= n > 2 ? f.chi2 / static_cast<double>(n - 2) : 0.0;
    out.error = std::sqrt(std::max(0.0, var));
    out.note = std::move(note);
    return out;
  };

  if (!options.allow_free) return fixed("free exponent disabled");
  if (n < 4) return fixed("fewer than four sizes; exponent fixed");

  // Scan the exponent, then refine the best bracket by golden section.
  constexpr int kSteps = 240;
  const double lo = options.min_exponent, hi = options.max_exponent;
  const double step = (hi - lo) / kSteps;
  int best = 0;
  double best_chi2 = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kSteps; ++k) {
    const LinearFit f = fit_at(lo + k * step);
    if (f.ok && f.chi2 < best_chi2) {
      best_chi2 = f.chi2;
      best = k;
    }
  }
  if (best == 0 || best == kSteps) return fixed("free exponent ran to its bound; exponent fixed");
  double a = lo + (best - 1) * step, b = lo + (best + 1) * step;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - golden * (b - a), d = a + golden * (b - a);
  double fc = fit_at(c).chi2, fd = fit_at(d).chi2;
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - golden * (b - a);
      fc = fit_at(c).chi2;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + golden * (b - a);
      fd = fit_at(d).chi2;
    }
  }
  const double theta = 0.5 * (a + b);
  const LinearFit f = fit_at(theta);
  if (!f.ok) return fixed("free fit singular; exponent fixed");

  // Covariance of (lambda_inf, a, theta) from the Jacobian at the optimum.
  std::array<std::array<double, 3>, 3> jtj{}, cov{};
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = std::pow(per_size[i].size, -theta);
    const std::array<double, 3> j{1.0, xi, -f.slope * std::log(per_size[i].size) * xi};
    for (int r = 0; r < 3; ++r) {
      for (int s = 0; s < 3; ++s) jtj[r][s] += w[i] * j[r] * j[s];
    }
  }
  if (!invert3(jtj, cov)) return fixed("free fit singular; exponent fixed");
  double scale = 1.0;
  if (!weighted) scale = n > 3 ? f.chi2 / static_cast<double>(n - 3) : 0.0;
  const double amp_err = std::sqrt(std::max(0.0, cov[1][1] * scale));
  const double theta_err = std::sqrt(std::max(0.0, cov[2][2] * scale));
  // An amplitude compatible with zero leaves the exponent undetermined.
  if (std::abs(f.slope) < 1e-12 || (amp_err > 0.0 && std::abs(f.slope) < amp_err) ||
      (theta_err > 0.0 && theta_err > theta)) {
    return fixed("free exponent poorly determined; exponent fixed");
  }
  out.mode = FitMode::free_exponent;
  out.exponent = theta;
  out.value = f.intercept;
  out.amplitude = f.slope;
  out.chi2 = f.chi2;
  out.error = std::sqrt(std::max(0.0, cov[0][0] * scale));
  out.note = "exponent fitted";
  return out;
}

}  // namespace lossperc
