#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lossperc {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class LatticeFamily { hypercubic, diamond, bcc, fcc, extended_hypercubic, rhg };
enum class Boundary { periodic, open };

std::string_view to_string(LatticeFamily family);
std::string_view to_string(Boundary boundary);
LatticeFamily parse_family(std::string_view name);
Boundary parse_boundary(std::string_view name);

/// A displacement class of the extended hypercubic lattice, given by its
/// canonical representative: non-negative components sorted descending with
/// trailing zeros dropped. {1} is the nearest-neighbour shell, {1,1} the
/// next-nearest, {2} the second shell along an axis, and so on. The class is
/// closed under sign flips and axis permutations.
using DisplacementClass = std::vector<int>;

/// Parses "1", "11", "111", "2", "21" (one digit per component).
DisplacementClass parse_displacement_class(std::string_view text);

struct LatticeSpec {
  LatticeFamily family = LatticeFamily::hypercubic;
  int dimension = 2;
  /// Unit cells per axis.
  int size = 4;
  /// Per-axis boundary. Empty means axis 0 open and every other axis periodic.
  std::vector<Boundary> boundary;
  /// Displacement classes (extended_hypercubic only). Empty means {{1}}.
  std::vector<DisplacementClass> neighborhood;

  Boundary boundary_of(int axis) const;
  bool all_periodic() const;
};

/// Coordination number of the periodic lattice described by `spec`.
int coordination_number(const LatticeSpec& spec);
/// Number of nodes per unit cell.
int basis_size(const LatticeSpec& spec);

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable graph. Adjacency is stored in compressed-row form with the
/// incident edge id kept alongside every neighbour entry.
class Lattice {
 public:
  Lattice() = default;

  /// Symmetric graph from an edge list. Edge ids follow the list order.
  static Lattice from_edges(std::size_t node_count, std::vector<Edge> edges,
                            std::vector<std::uint8_t> face_min = {},
                            std::vector<std::uint8_t> face_max = {});

  /// Graph from raw per-node neighbour lists, taken as given (no
  /// symmetrisation). Used to hand-build broken graphs for `validate`.
  static Lattice from_adjacency(const std::vector<std::vector<NodeId>>& adjacency,
                                std::vector<std::uint8_t> face_min = {},
                                std::vector<std::uint8_t> face_max = {});

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const NodeId> neighbors(NodeId node) const {
    return {neighbors_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
  }
  std::span<const EdgeId> incident_edges(NodeId node) const {
    return {incident_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
  }
  std::size_t degree(NodeId node) const { return offsets_[node + 1] - offsets_[node]; }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId id) const { return edges_[id]; }

  bool face_min(NodeId node) const { return (faces_[node] & 1u) != 0; }
  bool face_max(NodeId node) const { return (faces_[node] & 2u) != 0; }

  /// Family coordination number when built from a spec, 0 otherwise.
  int expected_coordination() const { return expected_coordination_; }
  /// True when every axis was periodic, so the graph must be regular.
  bool regular_expected() const { return regular_expected_; }
  const std::optional<LatticeSpec>& spec() const { return spec_; }

  /// Copy with the given edges deleted; spec metadata is kept so that
  /// `validate` still judges the result against the family.
  Lattice without_edges(std::span<const EdgeId> removed) const;

  // Cache hints used by the sweep loop; no observable effect.
  void prefetch_row(NodeId node) const {
    __builtin_prefetch(offsets_.data() + node);
    __builtin_prefetch(faces_.data() + node);
  }
  void prefetch_adjacency(NodeId node) const {
    const std::size_t o = offsets_[node];
    __builtin_prefetch(neighbors_.data() + o);
    __builtin_prefetch(incident_.data() + o);
  }

 private:
  friend Lattice build(const LatticeSpec& spec);

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<EdgeId> incident_;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> faces_;  // bit 0: min face, bit 1: max face
  int expected_coordination_ = 0;
  bool regular_expected_ = false;
  std::optional<LatticeSpec> spec_;
};

/// Builds the lattice. Nodes are numbered row-major over unit cells (last
/// axis fastest) with a fixed intra-cell order. Throws std::invalid_argument
/// for unsupported family/dimension combinations, sizes below 2, and sizes
/// whose periodic wrap-around would create multi-edges or self-loops.
Lattice build(const LatticeSpec& spec);

struct ValidationReport {
  bool pass = true;
  std::vector<std::string> problems;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t asymmetric_entries = 0;
  std::size_t self_loops = 0;
  std::size_t duplicate_edges = 0;
  std::map<std::size_t, std::size_t> degree_histogram;
  std::size_t face_min_count = 0;
  std::size_t face_max_count = 0;
};

/// Structural check: symmetry, self-loops, duplicates, degree histogram
/// against the family coordination number, face tagging.
ValidationReport validate(const Lattice& lattice);

/// Writes `# nodes=<n> edges=<m>` followed by one `i j` line per edge.
void write_edge_list(const Lattice& lattice, std::ostream& out);

}  // namespace lossperc
