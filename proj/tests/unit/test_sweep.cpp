#include "doctest.h"
#include "lossperc/sweep.hpp"

using namespace lossperc;

namespace {

Lattice cubic(int size) {
  LatticeSpec s;
  s.dimension = 3;
  s.size = size;
  return build(s);
}

}  // namespace

TEST_CASE("sweep records have T + 1 monotone entries") {
  const Lattice g = cubic(5);
  for (Model m : {Model::bond, Model::site, Model::model1, Model::model2, Model::model2prime, Model::model3}) {
    CAPTURE(to_string(m));
    ModelParams p;
    p.model = m;
    p.n_max = 2;
    const SweepRecord r = run_sweep(g, p, 11);
    REQUIRE(r.largest.size() == r.total_photons + 1);
    REQUIRE(r.spanning.size() == r.total_photons + 1);
    for (std::size_t i = 1; i <= r.total_photons; ++i) {
      CHECK(r.largest[i] >= r.largest[i - 1]);
      CHECK(r.spanning[i] >= r.spanning[i - 1]);
    }
    if (r.onset) {
      CHECK(r.spanning[*r.onset] == 1);
      if (*r.onset > 0) CHECK(r.spanning[*r.onset - 1] == 0);
    }
  }
}

TEST_CASE("bond sweep ends fully connected") {
  const Lattice g = cubic(4);
  ModelParams p;
  p.model = Model::bond;
  const SweepRecord r = run_sweep(g, p, 5);
  CHECK(r.largest.front() == 1);
  CHECK(r.largest.back() == g.node_count());
  CHECK(r.spanning.back() == 1);
  REQUIRE(r.onset.has_value());
}

TEST_CASE("sweeps are reproducible from the seed") {
  const Lattice g = cubic(5);
  ModelParams p;
  p.model = Model::model2prime;
  CHECK(run_sweep(g, p, 3) == run_sweep(g, p, 3));
  CHECK_FALSE(run_sweep(g, p, 3).largest == run_sweep(g, p, 4).largest);
  Sweeper sw(g, p);
  CHECK(sw.record(3) == run_sweep(g, p, 3));
}

TEST_CASE("ensemble does not depend on the worker count") {
  const Lattice g = cubic(5);
  ModelParams p;
  p.model = Model::model2;
  const EnsembleRecord a = run_ensemble(g, p, 9, 100, 1);
  const EnsembleRecord b = run_ensemble(g, p, 9, 100, 4);
  CHECK(a.mean_largest == b.mean_largest);
  CHECK(a.span_probability == b.span_probability);
  CHECK(a.onsets == b.onsets);
  const SweepRecord first = run_sweep(g, p, 100);
  const EnsembleRecord one = run_ensemble(g, p, 1, 100, 1);
  for (std::size_t i = 0; i <= first.total_photons; ++i) {
    CHECK(one.mean_largest[i] == static_cast<double>(first.largest[i]));
  }
}

TEST_CASE("canonical ensemble matches convolving the mean record") {
  const Lattice g = cubic(5);
  ModelParams p;
  p.model = Model::model2prime;
  const std::vector<double> grid{0.0, 0.3, 0.7, 0.95, 1.0};
  const EnsembleRecord e = run_ensemble(g, p, 12, 7, 2);
  const CanonicalCurve direct = convolve(e.mean_largest, e.span_probability, grid);
  const CanonicalEnsemble c = canonical_ensemble(g, p, 12, 7, grid, 3);
  REQUIRE(c.curve.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(c.curve.mean_largest[k] == doctest::Approx(direct.mean_largest[k]).epsilon(1e-12));
    CHECK(c.curve.span_probability[k] == doctest::Approx(direct.span_probability[k]).epsilon(1e-12));
  }
  CHECK(c.threshold().value == doctest::Approx(e.threshold().value));
  CHECK(c.photons_total == 12 * e.total_photons);
}

TEST_CASE("variable photon counts are transformed run by run") {
  const Lattice g = cubic(4);
  ModelParams p;
  p.model = Model::model3;
  p.n_max = 3;
  const std::vector<double> grid{0.5, 1.0};
  const CanonicalEnsemble a = canonical_ensemble(g, p, 6, 1, grid, 1);
  const CanonicalEnsemble b = canonical_ensemble(g, p, 6, 1, grid, 3);
  CHECK(a.curve.mean_largest == b.curve.mean_largest);
  CHECK(a.photons == b.photons);
  const EnsembleRecord e = run_ensemble(g, p, 6, 1, 2);
  REQUIRE(e.runs.size() == 6);
  const CanonicalCurve ref = convolve_model3(e.runs, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(a.curve.mean_largest[k] == doctest::Approx(ref.mean_largest[k]).epsilon(1e-12));
  }
  // At eta = 1 every photon is present: the curve is the final record.
  double mean_final = 0.0;
  for (const auto& r : e.runs) mean_final += r.largest.back();
  CHECK(a.curve.mean_largest[1] == doctest::Approx(mean_final / 6.0));
}

TEST_CASE("resolve_workers") {
  CHECK(resolve_workers(3) == 3);
  CHECK(resolve_workers(0) >= 1);
}
