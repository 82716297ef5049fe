#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "lossperc/lattice.hpp"

using namespace lossperc;

namespace {

LatticeSpec make(LatticeFamily family, int dim, int size, bool periodic) {
  LatticeSpec s;
  s.family = family;
  s.dimension = dim;
  s.size = size;
  if (periodic) s.boundary.assign(dim, Boundary::periodic);
  return s;
}

bool has_neighbor(const Lattice& g, NodeId a, NodeId b) {
  const auto nb = g.neighbors(a);
  return std::find(nb.begin(), nb.end(), b) != nb.end();
}

}  // namespace

TEST_CASE("periodic square lattice is 4-regular") {
  const Lattice g = build(make(LatticeFamily::hypercubic, 2, 4, true));
  CHECK(g.node_count() == 16);
  CHECK(g.edge_count() == 32);
  for (NodeId n = 0; n < g.node_count(); ++n) CHECK(g.degree(n) == 4);
  const ValidationReport v = validate(g);
  CHECK(v.pass);
  CHECK(v.degree_histogram.size() == 1);
  CHECK(v.degree_histogram.at(4) == 16);
}

TEST_CASE("nodes are numbered row-major with the last axis fastest") {
  const Lattice g = build(make(LatticeFamily::hypercubic, 2, 4, true));
  // Node 1 is cell (0, 1).
  CHECK(has_neighbor(g, 1, 0));
  CHECK(has_neighbor(g, 1, 2));
  CHECK(has_neighbor(g, 1, 5));
  CHECK(has_neighbor(g, 1, 13));  // wrap along axis 0
  CHECK_FALSE(has_neighbor(g, 1, 6));
}

TEST_CASE("default boundary opens axis 0 and tags its faces") {
  const Lattice g = build(make(LatticeFamily::hypercubic, 3, 4, false));
  CHECK(g.node_count() == 64);
  CHECK(g.edge_count() == 3 * 64 - 16);
  const ValidationReport v = validate(g);
  CHECK(v.pass);
  CHECK(v.face_min_count == 16);
  CHECK(v.face_max_count == 16);
  CHECK(g.face_min(0));
  CHECK_FALSE(g.face_max(0));
  CHECK(g.face_max(63));
}

TEST_CASE("coordination numbers and basis sizes") {
  struct Row {
    LatticeFamily family;
    int dim;
    int z;
    int basis;
  };
  const Row rows[] = {
      {LatticeFamily::hypercubic, 2, 4, 1}, {LatticeFamily::hypercubic, 3, 6, 1}, {LatticeFamily::hypercubic, 4, 8, 1},
      {LatticeFamily::diamond, 2, 3, 2},    {LatticeFamily::diamond, 3, 4, 2},    {LatticeFamily::bcc, 3, 8, 2},
      {LatticeFamily::fcc, 3, 12, 4},       {LatticeFamily::rhg, 3, 4, 6},
  };
  for (const auto& r : rows) {
    CAPTURE(to_string(r.family));
    CAPTURE(r.dim);
    const LatticeSpec s = make(r.family, r.dim, 4, true);
    CHECK(coordination_number(s) == r.z);
    CHECK(basis_size(s) == r.basis);
    const Lattice g = build(s);
    CHECK(validate(g).pass);
    CHECK(g.node_count() == static_cast<std::size_t>(r.basis) * static_cast<std::size_t>(std::pow(4, r.dim)));
    CHECK(2 * g.edge_count() == static_cast<std::size_t>(r.z) * g.node_count());
  }
}

TEST_CASE("extended hypercubic neighbourhood shells") {
  LatticeSpec s = make(LatticeFamily::extended_hypercubic, 2, 6, true);
  s.neighborhood = {{1}, {1, 1}};
  CHECK(coordination_number(s) == 8);
  s.neighborhood = {{1}, {2}};
  CHECK(coordination_number(s) == 8);
  s.dimension = 3;
  s.boundary.assign(3, Boundary::periodic);
  s.neighborhood = {{1}, {1, 1}, {1, 1, 1}};
  CHECK(coordination_number(s) == 26);
  CHECK(validate(build(s)).pass);
}

TEST_CASE("parse helpers") {
  CHECK(parse_family("hypercubic") == LatticeFamily::hypercubic);
  CHECK(parse_family("rhg") == LatticeFamily::rhg);
  CHECK(parse_boundary("open") == Boundary::open);
  CHECK(parse_boundary("periodic") == Boundary::periodic);
  CHECK(parse_displacement_class("11") == DisplacementClass{1, 1});
  CHECK(parse_displacement_class("21") == DisplacementClass{2, 1});
  CHECK_THROWS_AS(parse_family("kagome"), std::invalid_argument);
  CHECK_THROWS_AS(parse_boundary("twisted"), std::invalid_argument);
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(build(make(LatticeFamily::hypercubic, 2, 1, false)), std::invalid_argument);
  // Periodic size 2 would join a node to the same neighbour twice.
  CHECK_THROWS_AS(build(make(LatticeFamily::hypercubic, 2, 2, true)), std::invalid_argument);
  CHECK_THROWS_AS(build(make(LatticeFamily::rhg, 2, 4, true)), std::invalid_argument);
}

TEST_CASE("validate detects broken graphs") {
  SUBCASE("asymmetric") {
    const Lattice g = Lattice::from_adjacency({{1}, {}});
    const ValidationReport v = validate(g);
    CHECK_FALSE(v.pass);
    CHECK(v.asymmetric_entries > 0);
  }
  SUBCASE("self loop") {
    const Lattice g = Lattice::from_adjacency({{0, 1}, {0}});
    const ValidationReport v = validate(g);
    CHECK_FALSE(v.pass);
    CHECK(v.self_loops > 0);
  }
  SUBCASE("duplicate") {
    const Lattice g = Lattice::from_adjacency({{1, 1}, {0, 0}});
    CHECK_FALSE(validate(g).pass);
    CHECK(validate(g).duplicate_edges > 0);
  }
  SUBCASE("missing edge") {
    const Lattice full = build(make(LatticeFamily::hypercubic, 3, 4, true));
    const EdgeId drop = 5;
    const Lattice g = full.without_edges(std::span<const EdgeId>(&drop, 1));
    CHECK(g.edge_count() == full.edge_count() - 1);
    CHECK_FALSE(validate(g).pass);
  }
}

TEST_CASE("incident edge ids match the edge list") {
  const Lattice g = build(make(LatticeFamily::diamond, 3, 3, true));
  for (NodeId n = 0; n < g.node_count(); ++n) {
    const auto nb = g.neighbors(n);
    const auto inc = g.incident_edges(n);
    REQUIRE(nb.size() == inc.size());
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const Edge& e = g.edge(inc[k]);
      CHECK(((e.u == n && e.v == nb[k]) || (e.v == n && e.u == nb[k])));
    }
  }
}
