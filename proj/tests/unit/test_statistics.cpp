#include <cmath>
#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "lossperc/statistics.hpp"

using namespace lossperc;

namespace {

double log_binomial_pmf(std::size_t n, std::size_t k, double p) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
         (n - k) * std::log1p(-p);
}

}  // namespace

TEST_CASE("binomial weights match log-gamma probabilities") {
  for (std::size_t n : {1u, 7u, 50u, 1000u}) {
    for (double p : {0.05, 0.3, 0.5, 0.91}) {
      CAPTURE(n);
      CAPTURE(p);
      const BinomialWeights w = binomial_weights(n, p);
      double sum = 0.0;
      for (double v : w.values) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
      for (std::size_t k = w.first; k < w.first + w.values.size(); ++k) {
        const double ref = std::exp(log_binomial_pmf(n, k, p));
        if (ref > 1e-9) CHECK(w.at(k) == doctest::Approx(ref).epsilon(1e-9));
      }
      CHECK(w.at(n + 5) == 0.0);
    }
  }
}

TEST_CASE("binomial weights at the endpoints") {
  const BinomialWeights zero = binomial_weights(10, 0.0);
  CHECK(zero.at(0) == 1.0);
  CHECK(zero.values.size() == 1);
  const BinomialWeights one = binomial_weights(10, 1.0);
  CHECK(one.at(10) == 1.0);
  CHECK(one.values.size() == 1);
}

TEST_CASE("gaussian weights approximate exact weights for large N") {
  BinomialOptions exact;
  exact.method = BinomialOptions::Method::exact;
  BinomialOptions gauss;
  gauss.method = BinomialOptions::Method::gaussian;
  const std::size_t n = 2'000'000;
  const BinomialWeights a = binomial_weights(n, 0.4, exact);
  const BinomialWeights b = binomial_weights(n, 0.4, gauss);
  const std::size_t mode = 800'000;
  CHECK(b.at(mode) == doctest::Approx(a.at(mode)).epsilon(1e-3));
  CHECK(b.at(mode + 700) == doctest::Approx(a.at(mode + 700)).epsilon(1e-2));
}

TEST_CASE("convolution reproduces binomial moments") {
  const std::size_t n = 400;
  std::vector<double> linear(n + 1), square(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    linear[i] = static_cast<double>(i);
    square[i] = static_cast<double>(i * i);
  }
  const std::vector<double> grid{0.0, 0.1, 0.5, 0.77, 1.0};
  const auto m1 = convolve(linear, grid);
  const auto m2 = convolve(square, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double p = grid[k];
    CHECK(m1[k] == doctest::Approx(n * p).epsilon(1e-10));
    CHECK(m2[k] == doctest::Approx(n * p * (1 - p) + n * n * p * p).epsilon(1e-10));
  }
  const std::vector<double> constant(n + 1, 3.5);
  for (double v : convolve(constant, grid)) CHECK(v == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("threshold estimate from onsets") {
  const std::vector<std::optional<std::size_t>> onsets{5, 10, std::nullopt};
  const std::vector<std::size_t> photons{10, 20, 10};
  const ThresholdEstimate t = estimate_threshold(onsets, photons);
  CHECK(t.runs == 3);
  CHECK(t.spanned == 2);
  CHECK_FALSE(t.all_spanned());
  CHECK(t.value == doctest::Approx(0.5));
  CHECK(t.error == doctest::Approx(0.0));
  const std::vector<double> fractions{0.4, 0.5, 0.6};
  const ThresholdEstimate f = estimate_threshold(fractions);
  CHECK(f.value == doctest::Approx(0.5));
  CHECK(f.error == doctest::Approx(0.1 / std::sqrt(3.0)));
  const std::vector<std::optional<std::size_t>> none{std::nullopt, std::nullopt};
  const std::vector<std::size_t> four{4, 4};
  CHECK_FALSE(estimate_threshold(none, four).valid());
}

TEST_CASE("extrapolation recovers synthetic finite-size data") {
  auto rows_for = [](double lambda, double a, double theta, std::vector<double> sizes) {
    std::vector<SizeThreshold> rows;
    for (double L : sizes) rows.push_back({L, lambda + a * std::pow(L, -theta), 1e-4});
    return rows;
  };
  SUBCASE("three sizes fix the exponent") {
    const auto rows = rows_for(0.3, 0.5, 1.0, {8, 16, 32});
    const Extrapolation x = extrapolate(rows);
    CHECK(x.mode == FitMode::fixed_exponent);
    CHECK(x.value == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(x.amplitude == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_FALSE(x.note.empty());
  }
  SUBCASE("four sizes fit the exponent") {
    const auto rows = rows_for(0.25, -0.8, 1.5, {8, 12, 16, 24, 32});
    const Extrapolation x = extrapolate(rows);
    CHECK(x.mode == FitMode::free_exponent);
    CHECK(x.exponent == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(x.value == doctest::Approx(0.25).epsilon(1e-6));
  }
  SUBCASE("free fit can be disabled") {
    ExtrapolationOptions opt;
    opt.allow_free = false;
    const Extrapolation x = extrapolate(rows_for(0.25, 0.3, 1.0, {8, 16, 32, 64}), opt);
    CHECK(x.mode == FitMode::fixed_exponent);
    CHECK(x.value == doctest::Approx(0.25).epsilon(1e-9));
  }
  SUBCASE("too few sizes") {
    CHECK_THROWS_AS(extrapolate(rows_for(0.3, 0.5, 1.0, {8, 16})), std::invalid_argument);
  }
}
