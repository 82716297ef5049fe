#include "lossperc/lattice.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <utility>

namespace lossperc {

namespace {

// One undirected bond of the unit-cell template: basis node `from` in cell c
// connects to basis node `to` in cell c + shift.
struct BondTemplate {
  int from;
  int to;
  std::vector<int> shift;
};

struct CellTemplate {
  int basis = 1;
  std::vector<BondTemplate> bonds;
};

std::vector<int> unit(int dimension, int axis, int sign = 1) {
  std::vector<int> v(dimension, 0);
  v[axis] = sign;
  return v;
}

void check_dimension(const LatticeSpec& spec, int lo, int hi) {
  if (spec.dimension < lo || spec.dimension > hi) {
    throw std::invalid_argument(std::string(to_string(spec.family)) + " lattice supports dimension " +
                                std::to_string(lo) + ".." + std::to_string(hi) + ", got " +
                                std::to_string(spec.dimension));
  }
}

// All members of a displacement class with first non-zero component positive
// (one representative per undirected bond).
std::vector<std::vector<int>> expand_class(const DisplacementClass& cls, int dimension) {
  if (cls.empty() || static_cast<int>(cls.size()) > dimension) {
    throw std::invalid_argument("displacement class does not fit the lattice dimension");
  }
  std::vector<int> base(dimension, 0);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (cls[i] < 0) throw std::invalid_argument("displacement class components must be non-negative");
    base[i] = cls[i];
  }
  if (std::all_of(base.begin(), base.end(), [](int x) { return x == 0; })) {
    throw std::invalid_argument("zero displacement class");
  }
  std::sort(base.begin(), base.end());
  std::set<std::vector<int>> out;
  do {
    std::vector<int> nz;
    for (int k = 0; k < dimension; ++k) {
      if (base[k] != 0) nz.push_back(k);
    }
    for (unsigned mask = 0; mask < (1u << nz.size()); ++mask) {
      std::vector<int> v = base;
      for (std::size_t b = 0; b < nz.size(); ++b) {
        if (mask & (1u << b)) v[nz[b]] = -v[nz[b]];
      }
      auto first = std::find_if(v.begin(), v.end(), [](int x) { return x != 0; });
      if (*first > 0) out.insert(v);
    }
  } while (std::next_permutation(base.begin(), base.end()));
  return {out.begin(), out.end()};
}

std::vector<DisplacementClass> effective_neighborhood(const LatticeSpec& spec) {
  if (spec.neighborhood.empty()) return {DisplacementClass{1}};
  return spec.neighborhood;
}

CellTemplate make_template(const LatticeSpec& spec) {
  const int d = spec.dimension;
  CellTemplate t;
  switch (spec.family) {
    case LatticeFamily::hypercubic:
      check_dimension(spec, 1, 10);
      t.basis = 1;
      for (int k = 0; k < d; ++k) t.bonds.push_back({0, 0, unit(d, k)});
      break;
    case LatticeFamily::diamond:
      // Basis A (0) and B (1); A(c) bonds to B(c) and B(c - e_k). Gives the
      // honeycomb lattice for d = 2 and diamond for d = 3, z = d + 1.
      check_dimension(spec, 2, 6);
      t.basis = 2;
      t.bonds.push_back({0, 1, std::vector<int>(d, 0)});
      for (int k = 0; k < d; ++k) t.bonds.push_back({0, 1, unit(d, k, -1)});
      break;
    case LatticeFamily::bcc:
      // Corner (0) and body centre (1); the centre of cell c bonds to the 2^d
      // corners c + s, s in {0,1}^d.
      check_dimension(spec, 2, 6);
      t.basis = 2;
      for (unsigned s = 0; s < (1u << d); ++s) {
        std::vector<int> shift(d);
        for (int k = 0; k < d; ++k) shift[k] = (s >> k) & 1u;
        t.bonds.push_back({1, 0, shift});
      }
      break;
    case LatticeFamily::fcc: {
      // Checkerboard lattice D_d: integer points with even coordinate sum,
      // neighbours x +- e_i +- e_j, z = 2d(d-1). Conventional cell of side 2
      // holds 2^(d-1) points.
      check_dimension(spec, 2, 6);
      std::vector<std::vector<int>> basis;
      for (unsigned m = 0; m < (1u << d); ++m) {
        std::vector<int> b(d);
        int parity = 0;
        for (int k = 0; k < d; ++k) {
          b[k] = (m >> k) & 1u;
          parity += b[k];
        }
        if (parity % 2 == 0) basis.push_back(b);
      }
      t.basis = static_cast<int>(basis.size());
      auto index_of = [&](const std::vector<int>& b) {
        return static_cast<int>(std::find(basis.begin(), basis.end(), b) - basis.begin());
      };
      for (int bi = 0; bi < t.basis; ++bi) {
        for (int i = 0; i < d; ++i) {
          for (int j = i + 1; j < d; ++j) {
            for (int sj : {1, -1}) {
              std::vector<int> x = basis[bi];
              x[i] += 1;
              x[j] += sj;
              std::vector<int> shift(d), rem(d);
              for (int k = 0; k < d; ++k) {
                shift[k] = x[k] >= 0 ? x[k] / 2 : -((1 - x[k]) / 2);
                rem[k] = x[k] - 2 * shift[k];
              }
              t.bonds.push_back({bi, index_of(rem), shift});
            }
          }
        }
      }
      break;
    }
    case LatticeFamily::extended_hypercubic: {
      check_dimension(spec, 1, 10);
      t.basis = 1;
      std::set<DisplacementClass> seen;
      for (const auto& cls : effective_neighborhood(spec)) {
        if (!seen.insert(cls).second) throw std::invalid_argument("duplicate displacement class");
        for (auto& v : expand_class(cls, d)) t.bonds.push_back({0, 0, std::move(v)});
      }
      break;
    }
    case LatticeFamily::rhg:
      // Edge nodes E_k (0..2) sit on the cubic-complex edge from vertex c
      // along axis k; face nodes F_k (3..5) on the face at c with normal k.
      // F_k bonds to the four edges bounding it.
      check_dimension(spec, 3, 3);
      t.basis = 6;
      for (int k = 0; k < 3; ++k) {
        const int a = k == 0 ? 1 : 0;
        const int b = k == 2 ? 1 : 2;
        t.bonds.push_back({3 + k, a, std::vector<int>(3, 0)});
        t.bonds.push_back({3 + k, a, unit(3, b)});
        t.bonds.push_back({3 + k, b, std::vector<int>(3, 0)});
        t.bonds.push_back({3 + k, b, unit(3, a)});
      }
      break;
  }
  return t;
}

void build_csr(std::size_t node_count, const std::vector<std::vector<std::pair<NodeId, EdgeId>>>& adj,
               std::vector<std::size_t>& offsets, std::vector<NodeId>& neighbors,
               std::vector<EdgeId>& incident) {
  offsets.assign(node_count + 1, 0);
  for (std::size_t i = 0; i < node_count; ++i) offsets[i + 1] = offsets[i] + adj[i].size();
  neighbors.resize(offsets.back());
  incident.resize(offsets.back());
  for (std::size_t i = 0; i < node_count; ++i) {
    std::size_t pos = offsets[i];
    for (auto [n, e] : adj[i]) {
      neighbors[pos] = n;
      incident[pos] = e;
      ++pos;
    }
  }
}

std::vector<std::uint8_t> merged_faces(const std::vector<std::uint8_t>& face_min,
                                       const std::vector<std::uint8_t>& face_max, std::size_t n) {
  for (const auto* f : {&face_min, &face_max}) {
    if (!f->empty() && f->size() != n) throw std::invalid_argument("face flag array has wrong length");
  }
  std::vector<std::uint8_t> faces(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!face_min.empty() && face_min[i]) faces[i] |= 1u;
    if (!face_max.empty() && face_max[i]) faces[i] |= 2u;
  }
  return faces;
}

}  // namespace

std::string_view to_string(LatticeFamily family) {
  switch (family) {
    case LatticeFamily::hypercubic: return "hypercubic";
    case LatticeFamily::diamond: return "diamond";
    case LatticeFamily::bcc: return "bcc";
    case LatticeFamily::fcc: return "fcc";
    case LatticeFamily::extended_hypercubic: return "extended_hypercubic";
    case LatticeFamily::rhg: return "rhg";
  }
  return "?";
}

std::string_view to_string(Boundary boundary) {
  return boundary == Boundary::open ? "open" : "periodic";
}

LatticeFamily parse_family(std::string_view name) {
  for (auto f : {LatticeFamily::hypercubic, LatticeFamily::diamond, LatticeFamily::bcc,
                 LatticeFamily::fcc, LatticeFamily::extended_hypercubic, LatticeFamily::rhg}) {
    if (name == to_string(f)) return f;
  }
  if (name == "square" || name == "cubic" || name == "sc") return LatticeFamily::hypercubic;
  if (name == "extended") return LatticeFamily::extended_hypercubic;
  throw std::invalid_argument("unknown lattice family '" + std::string(name) + "'");
}

Boundary parse_boundary(std::string_view name) {
  if (name == "open") return Boundary::open;
  if (name == "periodic") return Boundary::periodic;
  throw std::invalid_argument("unknown boundary '" + std::string(name) + "'");
}

DisplacementClass parse_displacement_class(std::string_view text) {
  DisplacementClass cls;
  for (char c : text) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad displacement class '" + std::string(text) + "'");
    cls.push_back(c - '0');
  }
  std::sort(cls.begin(), cls.end(), std::greater<>());
  while (!cls.empty() && cls.back() == 0) cls.pop_back();
  if (cls.empty()) throw std::invalid_argument("bad displacement class '" + std::string(text) + "'");
  return cls;
}

Boundary LatticeSpec::boundary_of(int axis) const {
  if (boundary.empty()) return axis == 0 ? Boundary::open : Boundary::periodic;
  return boundary.at(axis);
}

bool LatticeSpec::all_periodic() const {
  for (int k = 0; k < dimension; ++k) {
    if (boundary_of(k) != Boundary::periodic) return false;
  }
  return true;
}

int coordination_number(const LatticeSpec& spec) {
  return 2 * static_cast<int>(make_template(spec).bonds.size()) / basis_size(spec);
}

int basis_size(const LatticeSpec& spec) { return make_template(spec).basis; }

Lattice Lattice::from_edges(std::size_t node_count, std::vector<Edge> edges,
                            std::vector<std::uint8_t> face_min, std::vector<std::uint8_t> face_max) {
  Lattice g;
  std::vector<std::vector<std::pair<NodeId, EdgeId>>> adj(node_count);
  for (std::size_t id = 0; id < edges.size(); ++id) {
    auto& e = edges[id];
    if (e.u >= node_count || e.v >= node_count) throw std::invalid_argument("edge endpoint out of range");
    if (e.u > e.v) std::swap(e.u, e.v);
    adj[e.u].emplace_back(e.v, static_cast<EdgeId>(id));
    if (e.u != e.v) adj[e.v].emplace_back(e.u, static_cast<EdgeId>(id));
  }
  build_csr(node_count, adj, g.offsets_, g.neighbors_, g.incident_);
  g.edges_ = std::move(edges);
  g.faces_ = merged_faces(face_min, face_max, node_count);
  return g;
}

Lattice Lattice::from_adjacency(const std::vector<std::vector<NodeId>>& adjacency,
                                std::vector<std::uint8_t> face_min, std::vector<std::uint8_t> face_max) {
  Lattice g;
  const std::size_t n = adjacency.size();
  std::map<std::pair<NodeId, NodeId>, EdgeId> ids;
  std::vector<std::vector<std::pair<NodeId, EdgeId>>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId j : adjacency[i]) {
      if (j >= n) throw std::invalid_argument("neighbour id out of range");
      auto key = std::minmax(static_cast<NodeId>(i), j);
      auto [it, inserted] = ids.emplace(key, static_cast<EdgeId>(g.edges_.size()));
      if (inserted) g.edges_.push_back({key.first, key.second});
      adj[i].emplace_back(j, it->second);
    }
  }
  build_csr(n, adj, g.offsets_, g.neighbors_, g.incident_);
  g.faces_ = merged_faces(face_min, face_max, n);
  return g;
}

Lattice Lattice::without_edges(std::span<const EdgeId> removed) const {
  std::vector<std::uint8_t> drop(edges_.size(), 0);
  for (EdgeId e : removed) drop.at(e) = 1;
  std::vector<Edge> kept;
  for (std::size_t id = 0; id < edges_.size(); ++id) {
    if (!drop[id]) kept.push_back(edges_[id]);
  }
  std::vector<std::uint8_t> face_min(node_count()), face_max(node_count());
  for (std::size_t i = 0; i < node_count(); ++i) {
    face_min[i] = faces_[i] & 1u;
    face_max[i] = (faces_[i] >> 1) & 1u;
  }
  Lattice g = from_edges(node_count(), std::move(kept), std::move(face_min), std::move(face_max));
  g.expected_coordination_ = expected_coordination_;
  g.regular_expected_ = regular_expected_;
  g.spec_ = spec_;
  return g;
}

Lattice build(const LatticeSpec& spec) {
  if (spec.size < 2) throw std::invalid_argument("lattice size must be at least 2");
  if (!spec.boundary.empty() && static_cast<int>(spec.boundary.size()) != spec.dimension) {
    throw std::invalid_argument("boundary list must name every axis");
  }
  if (spec.family != LatticeFamily::extended_hypercubic && !spec.neighborhood.empty()) {
    throw std::invalid_argument("neighbourhood classes only apply to extended_hypercubic");
  }
  const CellTemplate tmpl = make_template(spec);
  const int d = spec.dimension;
  const std::int64_t L = spec.size;

  std::int64_t cells = 1;
  for (int k = 0; k < d; ++k) {
    cells *= L;
    if (cells * tmpl.basis > std::numeric_limits<NodeId>::max() / 2) {
      throw std::invalid_argument("lattice too large");
    }
  }
  const std::size_t n = static_cast<std::size_t>(cells * tmpl.basis);

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(cells) * tmpl.bonds.size());
  std::vector<std::int64_t> coord(d), target(d);
  for (std::int64_t ci = 0; ci < cells; ++ci) {
    std::int64_t rest = ci;
    for (int k = d - 1; k >= 0; --k) {
      coord[k] = rest % L;
      rest /= L;
    }
    for (const auto& bond : tmpl.bonds) {
      bool inside = true;
      std::int64_t cj = 0;
      for (int k = 0; k < d; ++k) {
        std::int64_t x = coord[k] + bond.shift[k];
        if (x < 0 || x >= L) {
          if (spec.boundary_of(k) == Boundary::open) {
            inside = false;
            break;
          }
          x = ((x % L) + L) % L;
        }
        cj = cj * L + x;
      }
      if (!inside) continue;
      const auto u = static_cast<NodeId>(ci * tmpl.basis + bond.from);
      const auto v = static_cast<NodeId>(cj * tmpl.basis + bond.to);
      if (u == v) {
        throw std::invalid_argument("lattice size " + std::to_string(L) +
                                    " too small: periodic wrap-around creates a self-loop");
      }
      edges.push_back({std::min(u, v), std::max(u, v)});
    }
  }

  std::vector<std::pair<NodeId, NodeId>> sorted;
  sorted.reserve(edges.size());
  for (const auto& e : edges) sorted.emplace_back(e.u, e.v);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("lattice size " + std::to_string(L) +
                                " too small: periodic wrap-around creates duplicate edges");
  }

  std::vector<std::uint8_t> fmin(n, 0), fmax(n, 0);
  if (spec.boundary_of(0) == Boundary::open) {
    const std::int64_t stride = cells / L;  // cells per slab of fixed axis-0 coordinate
    for (std::size_t node = 0; node < n; ++node) {
      const std::int64_t c0 = static_cast<std::int64_t>(node) / tmpl.basis / stride;
      fmin[node] = c0 == 0;
      fmax[node] = c0 == L - 1;
    }
  }

  Lattice g = Lattice::from_edges(n, std::move(edges), std::move(fmin), std::move(fmax));
  g.expected_coordination_ = 2 * static_cast<int>(tmpl.bonds.size()) / tmpl.basis;
  g.regular_expected_ = spec.all_periodic();
  g.spec_ = spec;
  return g;
}

ValidationReport validate(const Lattice& g) {
  ValidationReport r;
  r.node_count = g.node_count();
  r.edge_count = g.edge_count();

  std::vector<std::vector<NodeId>> sorted_adj(g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    auto nb = g.neighbors(i);
    sorted_adj[i].assign(nb.begin(), nb.end());
    std::sort(sorted_adj[i].begin(), sorted_adj[i].end());
    r.degree_histogram[nb.size()] += 1;
    r.face_min_count += g.face_min(i);
    r.face_max_count += g.face_max(i);
  }
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto& nb = sorted_adj[i];
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const NodeId j = nb[k];
      if (j == i) {
        ++r.self_loops;
        continue;
      }
      if (k > 0 && nb[k - 1] == j) ++r.duplicate_edges;
      if (!std::binary_search(sorted_adj[j].begin(), sorted_adj[j].end(), i)) ++r.asymmetric_entries;
    }
  }
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (const auto& e : g.edges()) {
    if (e.u == e.v) continue;  // already counted from the adjacency side
    pairs.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
  }
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    if (pairs[k] == pairs[k - 1]) ++r.duplicate_edges;
  }

  auto fail = [&](std::string msg) {
    r.pass = false;
    r.problems.push_back(std::move(msg));
  };
  if (r.asymmetric_entries) fail("asymmetric adjacency: " + std::to_string(r.asymmetric_entries) + " entries");
  if (r.self_loops) fail("self-loop: " + std::to_string(r.self_loops) + " entries");
  if (r.duplicate_edges) fail("duplicate edges: " + std::to_string(r.duplicate_edges));

  const int z = g.expected_coordination();
  if (z > 0) {
    if (g.regular_expected()) {
      if (r.degree_histogram.size() != 1 || r.degree_histogram.begin()->first != static_cast<std::size_t>(z)) {
        fail("degree histogram is not a single spike at z=" + std::to_string(z));
      }
      if (2 * r.edge_count != static_cast<std::size_t>(z) * r.node_count) {
        fail("edge count differs from z|V|/2");
      }
    } else if (!r.degree_histogram.empty() &&
               r.degree_histogram.rbegin()->first > static_cast<std::size_t>(z)) {
      fail("node degree exceeds z=" + std::to_string(z));
    }
  }

  if (const auto& spec = g.spec(); spec && spec->boundary_of(0) == Boundary::open) {
    const std::size_t slab = g.node_count() / static_cast<std::size_t>(spec->size);
    if (r.face_min_count != slab || r.face_max_count != slab) {
      fail("face tagging: expected " + std::to_string(slab) + " nodes per face");
    }
    for (NodeId i = 0; i < g.node_count(); ++i) {
      if (g.face_min(i) && g.face_max(i)) {
        fail("face tagging: node " + std::to_string(i) + " on both faces");
        break;
      }
    }
  }
  return r;
}

void write_edge_list(const Lattice& g, std::ostream& out) {
  out << "# nodes=" << g.node_count() << " edges=" << g.edge_count() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace lossperc
