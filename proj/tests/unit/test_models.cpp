#include <cmath>
#include <deque>
#include <numeric>

#include "doctest.h"
#include "lossperc/models.hpp"
#include "lossperc/rng.hpp"

using namespace lossperc;

namespace {

// Fusion outcomes fed by hand.
struct Scripted {
  std::deque<bool> outcomes;
  bool bernoulli(double) {
    REQUIRE_FALSE(outcomes.empty());
    const bool v = outcomes.front();
    outcomes.pop_front();
    return v;
  }
};

Lattice path3() { return Lattice::from_edges(3, {{0, 1}, {1, 2}}, {1, 0, 0}, {0, 0, 1}); }

ModelParams params_for(Model m) {
  ModelParams p;
  p.model = m;
  return p;
}

}  // namespace

TEST_CASE("repeat-until-success outcome probabilities") {
  for (int n = 1; n <= 12; ++n) {
    for (double eta : {0.0, 0.3, 0.77, 1.0}) {
      for (double ps : {0.25, 0.5, 0.8}) {
        const auto o = adaptive_probs(eta, n, ps);
        CHECK(o.failure + o.success + o.loss == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(o.failure >= 0.0);
        CHECK(o.success >= 0.0);
        CHECK(o.loss >= 0.0);
      }
    }
  }
  CHECK(adaptive_probs(1.0, 2, 0.5).success == 0.75);
  CHECK(adaptive_probs(1.0, 1, 0.5).success == 0.5);
  CHECK(adaptive_probs(0.0, 3, 0.5).loss == 1.0);
  // A single attempt needs both photons.
  const auto one = adaptive_probs(0.9, 1, 0.5);
  CHECK(one.success == doctest::Approx(0.81 * 0.5));
  CHECK(one.loss == doctest::Approx(1.0 - 0.81));
  // Two attempts: success on the first, or a clean failure then success.
  const double a = 0.81;
  const auto two = adaptive_probs(0.9, 2, 0.5);
  CHECK(two.success == doctest::Approx(a * 0.5 + a * 0.5 * a * 0.5));
  CHECK_THROWS_AS(adaptive_probs(0.5, 0), std::invalid_argument);
}

TEST_CASE("boosted outcome probabilities") {
  CHECK(boosted_probs(1.0, 1).success == 0.5);
  CHECK(boosted_probs(1.0, 2).success == 0.75);
  const auto o = boosted_probs(0.9, 2);
  CHECK(o.loss == doctest::Approx(1.0 - std::pow(0.9, 4)));
  CHECK(o.success == doctest::Approx(std::pow(0.9, 4) * 0.75));
  CHECK(o.failure + o.success + o.loss == doctest::Approx(1.0));
}

TEST_CASE("model names round-trip") {
  for (Model m : {Model::bond, Model::site, Model::model1, Model::model2, Model::model2prime, Model::model3,
                  Model::boosted}) {
    CHECK(parse_model(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_model("model4"), std::invalid_argument);
  ModelParams bad;
  bad.p_s = 1.5;
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
}

TEST_CASE("photon pool sizes") {
  const Lattice g = path3();
  CHECK(PercolationState(g, params_for(Model::bond)).photon_count() == 2);
  CHECK(PercolationState(g, params_for(Model::site)).photon_count() == 3);
  CHECK(PercolationState(g, params_for(Model::model1)).photon_count() == 3);
  CHECK(PercolationState(g, params_for(Model::model2)).photon_count() == 3 + 4);
  CHECK(PercolationState(g, params_for(Model::model2prime)).photon_count() == 4);
  ModelParams b = params_for(Model::boosted);
  b.boost_n = 2;
  PercolationState s(g, b);
  Rng rng(1);
  CHECK(s.presample(rng) == 8);
}

TEST_CASE("bond model adds edges") {
  const Lattice g = path3();
  PercolationState s(g, params_for(Model::bond));
  Scripted none;
  CHECK(s.largest() == 1);
  s.add_photon(1, none);
  CHECK(s.largest() == 2);
  CHECK_FALSE(s.spanning());
  s.add_photon(0, none);
  CHECK(s.largest() == 3);
  CHECK(s.spanning());
  CHECK_THROWS_AS(s.add_bond(0), std::logic_error);
  CHECK(s.check_consistency());
}

TEST_CASE("model1: a lost qubit removes its neighbourhood") {
  const Lattice g = path3();
  PercolationState s(g, params_for(Model::model1));
  Scripted none;
  s.add_photon(1, none);
  CHECK(s.node_label(1) == NodeLabel::measure_z);
  CHECK(s.largest() == 0);
  s.add_photon(0, none);
  CHECK(s.node_label(0) == NodeLabel::exists);
  CHECK(s.node_label(1) == NodeLabel::measure_z);
  CHECK(s.largest() == 1);
  s.add_photon(2, none);
  CHECK(s.node_label(1) == NodeLabel::exists);
  CHECK(s.largest() == 3);
  CHECK(s.spanning());
  CHECK(s.check_consistency());
}

TEST_CASE("model2prime: a node joins once all of its fusions resolved") {
  const Lattice g = path3();
  PercolationState s(g, params_for(Model::model2prime));
  Scripted gen{{true, true}};
  s.add_photon(0, gen);
  CHECK(s.counter(0) == 1);
  CHECK(s.edge_label(0) == EdgeLabel::lost);
  CHECK(s.fusion_draws() == 0);
  s.add_photon(1, gen);
  CHECK(s.edge_label(0) == EdgeLabel::exists);
  CHECK(s.fusion_draws() == 1);
  CHECK(s.node_label(0) == NodeLabel::exists);
  CHECK(s.node_label(1) == NodeLabel::measure_z);
  CHECK(s.largest() == 1);
  s.add_photon(3, gen);
  s.add_photon(2, gen);
  CHECK(s.largest() == 3);
  CHECK(s.spanning());
  CHECK(s.check_consistency());
}

TEST_CASE("model2prime: failed fusion keeps nodes but not the link") {
  const Lattice g = path3();
  PercolationState s(g, params_for(Model::model2prime));
  Scripted gen{{false, true}};
  for (std::size_t i : {0u, 1u, 2u, 3u}) s.add_photon(i, gen);
  CHECK(s.edge_label(0) == EdgeLabel::failed);
  CHECK(s.edge_label(1) == EdgeLabel::exists);
  CHECK(s.largest() == 2);
  CHECK_FALSE(s.spanning());
  CHECK(s.check_consistency());
}

TEST_CASE("model2: a lost centre blocks partners linked by success") {
  const Lattice g = Lattice::from_edges(2, {{0, 1}});
  PercolationState s(g, params_for(Model::model2));
  Scripted gen{{true}};
  s.add_photon(2, gen);
  s.add_photon(3, gen);
  CHECK(s.edge_label(0) == EdgeLabel::exists);
  CHECK(s.largest() == 0);
  s.add_photon(0, gen);
  CHECK(s.node_label(0) == NodeLabel::measure_z);
  CHECK(s.largest() == 0);
  s.add_photon(1, gen);
  CHECK(s.largest() == 2);
  CHECK(s.check_consistency());
}

TEST_CASE("model2: a failed fusion does not propagate centre loss") {
  const Lattice g = Lattice::from_edges(2, {{0, 1}});
  PercolationState s(g, params_for(Model::model2));
  Scripted gen{{false}};
  s.add_photon(2, gen);
  s.add_photon(3, gen);
  s.add_photon(0, gen);
  CHECK(s.node_label(0) == NodeLabel::exists);
  CHECK(s.largest() == 1);
}

TEST_CASE("model3: a fusion resolves after all presampled photons") {
  const Lattice g = Lattice::from_edges(2, {{0, 1}});
  ModelParams p = params_for(Model::model3);
  p.n_max = 2;
  PercolationState s(g, p);
  s.set_slots(0, 4, false);
  REQUIRE(s.finish_presample() == 4);
  CHECK(s.required_photons(0) == 4);
  Scripted none;
  for (std::size_t i = 0; i < 3; ++i) {
    s.add_photon(i, none);
    CHECK(s.edge_label(0) == EdgeLabel::lost);
  }
  CHECK(s.counter(0) == 3);
  s.add_photon(3, none);
  CHECK(s.edge_label(0) == EdgeLabel::exists);
  CHECK(s.largest() == 2);
  CHECK_THROWS_AS(s.add_photon(3, none), std::logic_error);

  s.set_slots(0, 2, true);
  s.finish_presample();
  s.add_photon(0, none);
  s.add_photon(1, none);
  CHECK(s.edge_label(0) == EdgeLabel::failed);
  CHECK(s.all_fail(0));
  CHECK(s.largest() == 1);
}

TEST_CASE("presampled attempt counts stay within n_max") {
  const Lattice g = Lattice::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  ModelParams p = params_for(Model::model3);
  p.n_max = 3;
  PercolationState s(g, p);
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    const std::size_t t = s.presample(rng);
    std::size_t sum = 0;
    for (EdgeId e = 0; e < 3; ++e) {
      const auto slots = s.required_photons(e);
      CHECK(slots % 2 == 0);
      CHECK(slots >= 2);
      CHECK(slots <= 6);
      if (s.all_fail(e)) CHECK(slots == 6);
      sum += slots;
    }
    CHECK(sum == t);
  }
}

TEST_CASE("update rules stay consistent under random sweeps") {
  LatticeSpec spec;
  spec.dimension = 2;
  spec.size = 5;
  const Lattice g = build(spec);
  for (Model m : {Model::bond, Model::site, Model::model1, Model::model2, Model::model2prime, Model::model3,
                  Model::boosted}) {
    CAPTURE(to_string(m));
    ModelParams p = params_for(m);
    p.n_max = 2;
    p.boost_n = 2;
    PercolationState s(g, p);
    Rng rng(3);
    const std::size_t t = s.needs_presample() ? s.presample(rng) : (s.reset(), s.photon_count());
    std::vector<std::uint32_t> pool(t);
    std::iota(pool.begin(), pool.end(), 0u);
    shuffle(std::span<std::uint32_t>(pool), rng);
    std::size_t previous = s.largest();
    for (std::uint32_t i : pool) {
      s.add_photon(i, rng);
      std::string why;
      REQUIRE_MESSAGE(s.check_consistency(&why), why);
      REQUIRE(s.largest() >= previous);
      previous = s.largest();
    }
  }
}
