#include "doctest.h"
#include "lossperc/oracle.hpp"
#include "lossperc/verification.hpp"

using namespace lossperc;

namespace {

Lattice path3() { return Lattice::from_edges(3, {{0, 1}, {1, 2}}, {1, 0, 0}, {0, 0, 1}); }

ModelParams params_for(Model m) {
  ModelParams p;
  p.model = m;
  return p;
}

}  // namespace

TEST_CASE("evaluate applies the deletion rules") {
  const Lattice g = path3();
  Configuration c;
  c.node_present = {1, 1, 1};
  c.edge = {FusionOutcome::success, FusionOutcome::success};
  SUBCASE("bond") {
    CHECK(evaluate(g, Model::bond, c).largest == 3);
    CHECK(evaluate(g, Model::bond, c).spanning);
    c.edge[1] = FusionOutcome::failed;
    CHECK(evaluate(g, Model::bond, c).largest == 2);
  }
  SUBCASE("model1 removes the neighbourhood of a lost qubit") {
    c.node_present = {1, 1, 0};
    const OracleSample s = evaluate(g, Model::model1, c);
    CHECK(s.largest == 1);
    CHECK_FALSE(s.spanning);
  }
  SUBCASE("model2prime removes both ends of a lossy fusion") {
    c.edge[1] = FusionOutcome::lost;
    CHECK(evaluate(g, Model::model2prime, c).largest == 1);
  }
  SUBCASE("model2 removes partners of a lost centre linked by success") {
    c.node_present = {1, 1, 0};
    // Node 1 goes; node 0 keeps its star since its own neighbour is present.
    CHECK(evaluate(g, Model::model2, c).largest == 1);
    c.edge[1] = FusionOutcome::failed;
    CHECK(evaluate(g, Model::model2, c).largest == 2);
  }
}

TEST_CASE("exhaustive curve of a single bond") {
  const Lattice g = Lattice::from_edges(2, {{0, 1}}, {1, 0}, {0, 1});
  const std::vector<double> grid{0.0, 0.25, 0.6, 1.0};
  const CanonicalCurve c = exhaustive_curve(g, params_for(Model::bond), grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(c.mean_largest[k] == doctest::Approx(1.0 + grid[k]).epsilon(1e-14));
    CHECK(c.span_probability[k] == doctest::Approx(grid[k]).epsilon(1e-14));
  }
  // Model 2': both photons must arrive, then the fusion succeeds with p_s.
  const CanonicalCurve f = exhaustive_curve(g, params_for(Model::model2prime), grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double e2 = grid[k] * grid[k];
    CHECK(f.mean_largest[k] == doctest::Approx(e2 * (0.5 * 2 + 0.5 * 1)).epsilon(1e-14));
  }
}

TEST_CASE("exhaustive enumeration agrees with permutation averaging") {
  const Lattice g = path3();
  const std::vector<double> grid{0.2, 0.5, 0.9};
  for (Model m : {Model::bond, Model::site, Model::model1, Model::model2prime}) {
    CAPTURE(to_string(m));
    const CanonicalCurve a = exhaustive_curve(g, params_for(m), grid);
    const CanonicalCurve b = exact_microcanonical_curve(g, params_for(m), grid);
    Tolerance tol;
    tol.value = 1e-10;
    const ComparisonReport r = compare(a, b, tol);
    CHECK_MESSAGE(r.pass, r.summary());
  }
}

TEST_CASE("monte carlo oracle is consistent with the exact curve") {
  const Lattice g = path3();
  const std::vector<double> grid{0.3, 0.7};
  const ModelParams p = params_for(Model::model2);
  const CanonicalCurve exact = exhaustive_curve(g, p, grid);
  const CanonicalCurve mc = canonical_curve(g, p, grid, 4000, 17);
  REQUIRE(mc.has_errors());
  Tolerance tol;
  tol.kind = Tolerance::Kind::sigma;
  tol.value = 4.0;
  tol.span_floor = 1e-9;
  tol.largest_floor = 1e-9;
  const ComparisonReport r = compare(mc, exact, tol);
  CHECK_MESSAGE(r.pass, r.summary());
}

TEST_CASE("oracle guards") {
  const Lattice g = path3();
  const std::vector<double> a{0.1, 0.2};
  const std::vector<double> b{0.1, 0.3};
  const ModelParams p = params_for(Model::bond);
  CHECK_THROWS_AS(compare(exhaustive_curve(g, p, a), exhaustive_curve(g, p, b), Tolerance{}), std::invalid_argument);
  LatticeSpec big;
  big.dimension = 2;
  big.size = 6;
  CHECK_THROWS_AS(exhaustive_curve(build(big), params_for(Model::model2prime), a), std::invalid_argument);
}
