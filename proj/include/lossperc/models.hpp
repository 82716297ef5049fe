#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lossperc/dsu.hpp"
#include "lossperc/lattice.hpp"

namespace lossperc {

/// bond/site are classical percolation. model1 is loss on an existing graph
/// state, model2 a fusion network of all-photonic star states, model2prime
/// the same with loss-free emitter centres, model3 repeat-until-success
/// fusion with emitter centres, and boosted all-photonic boosted fusion with
/// 2^n photons per fusion.
enum class Model { bond, site, model1, model2, model2prime, model3, boosted };

std::string_view to_string(Model model);
Model parse_model(std::string_view name);

/// Central-qubit label: lost, must be measured in Z, or part of the graph.
enum class NodeLabel : std::uint8_t { lost, measure_z, exists };
/// Fusion label: some photon lost, fusion failed, fusion succeeded.
enum class EdgeLabel : std::uint8_t { lost, failed, exists };

struct ModelParams {
  Model model = Model::model2prime;
  double p_s = 0.5;
  int n_max = 1;
  int boost_n = 1;

  /// Throws std::invalid_argument when out of range.
  void check() const;
  /// True when the photon count varies from run to run.
  bool variable_photon_count() const { return model == Model::model3 || model == Model::boosted; }
};

struct OutcomeProbabilities {
  double failure;
  double success;
  double loss;
};

/// Closed-form outcome probabilities of a repeat-until-success fusion with at
/// most n_max attempts at photon efficiency eta.
OutcomeProbabilities adaptive_probs(double eta, int n_max, double p_s = 0.5);

/// Outcome probabilities of a fusion boosted with ancilla photon pairs
/// (2^boost_n photons, success 1 - 2^-boost_n when all are present).
OutcomeProbabilities boosted_probs(double eta, int boost_n);

/// Labels, fusion counters and the component forest of one model instance,
/// plus the photon-addition rules that keep them consistent. Photons are
/// added in pool order; `photon_count()` is the pool size.
///
/// Generators passed to the templated members only need `bernoulli(double)`.
class PercolationState {
 public:
  PercolationState(const Lattice& lattice, const ModelParams& params);

  const Lattice& lattice() const { return *lattice_; }
  const ModelParams& params() const { return params_; }

  /// Returns every label, counter and the forest to the all-lost state.
  /// Presampled attempt counts are kept.
  void reset();

  bool needs_presample() const { return params_.variable_photon_count(); }

  /// Model 3: draws the number of attempts n_ij each fusion needs in the
  /// absence of loss, with b_ij marking that all n_max attempts failed.
  /// Boosted: every fusion gets 2^boost_n photon slots and fails with
  /// probability 2^-boost_n. Resets the state and returns the photon count.
  template <class Gen>
  std::size_t presample(Gen& rng);

  /// Sets one fusion's photon slot count (2 n_ij) and failure flag by hand.
  /// Call `finish_presample` afterwards.
  void set_slots(EdgeId edge, std::uint32_t slots, bool all_fail);
  std::size_t finish_presample();

  std::size_t photon_count() const;

  /// Adds the photon at `pool_index` through the model's update rule.
  template <class Gen>
  void add_photon(std::size_t pool_index, Gen& rng);

  void add_bond(EdgeId edge);
  void add_site(NodeId node);
  void model1_add_photon(NodeId node);
  void model2_add_central(NodeId node);
  template <class Gen>
  void model2_add_fusion_photon(EdgeId edge, Gen& rng);
  void model3_add_fusion_photon(EdgeId edge);

  /// Cache hint for the photon at `pool_index`, which will be added a few
  /// steps later. Stage 0 fetches its fusion record, stage 1 the endpoint
  /// rows, stage 2 the endpoint adjacency, stage 3 the neighbour states. Never changes the state.
  void prefetch(std::size_t pool_index, int stage) const;

  std::size_t largest() const { return dsu_.largest_size(); }
  bool spanning() const { return dsu_.spanning(); }
  const DisjointSet& components() const { return dsu_; }

  NodeLabel node_label(NodeId node) const { return static_cast<NodeLabel>(node_[node]); }
  EdgeLabel edge_label(EdgeId edge) const { return static_cast<EdgeLabel>(edge_[edge]); }
  std::uint32_t counter(EdgeId edge) const { return count_[edge]; }
  /// Photons the fusion needs before it resolves (2 for single-shot fusions).
  std::uint32_t required_photons(EdgeId edge) const;
  bool all_fail(EdgeId edge) const { return fail_.empty() ? false : fail_[edge] != 0; }
  /// Number of fusion-outcome random draws made since the last reset.
  std::size_t fusion_draws() const { return draws_; }

  /// Full rescan: label predicate for every node, edge label against its
  /// counter, forest membership against labels, and the forest partition
  /// against a breadth-first search. Returns false and fills `why` on the
  /// first violation.
  bool check_consistency(std::string* why = nullptr) const;

 private:
  static constexpr std::uint8_t kL = static_cast<std::uint8_t>(NodeLabel::lost);
  static constexpr std::uint8_t kMZ = static_cast<std::uint8_t>(NodeLabel::measure_z);
  static constexpr std::uint8_t kE = static_cast<std::uint8_t>(NodeLabel::exists);
  static constexpr std::uint8_t kEdgeL = static_cast<std::uint8_t>(EdgeLabel::lost);
  static constexpr std::uint8_t kEdgeF = static_cast<std::uint8_t>(EdgeLabel::failed);
  static constexpr std::uint8_t kEdgeE = static_cast<std::uint8_t>(EdgeLabel::exists);

  bool fusion_model() const {
    return params_.model != Model::bond && params_.model != Model::site && params_.model != Model::model1;
  }
  // Algorithm 0: activate j and merge it with every existing neighbour,
  // across successful fusions only when `fusion_edges_only`.
  void add_node(NodeId j, bool fusion_edges_only);
  bool no_lost_neighbor(NodeId j) const;
  bool fusion_ready(NodeId j) const;
  bool no_lost_incident_edge(NodeId j) const;
  void try_activate_fusion_node(NodeId j);
  void resolve_fusion_endpoints(EdgeId edge);
  [[noreturn]] void contract(const std::string& what) const;

  const Lattice* lattice_;
  ModelParams params_;
  DisjointSet dsu_;
  std::vector<std::uint8_t> node_;
  std::vector<std::uint8_t> edge_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint32_t> slots_;      // model3/boosted: photons per fusion
  std::vector<std::uint8_t> fail_;        // model3/boosted: b_ij
  std::vector<EdgeId> slot_edge_;         // model3/boosted: pool index -> fusion
  std::size_t draws_ = 0;
};

template <class Gen>
std::size_t PercolationState::presample(Gen& rng) {
  const std::size_t m = lattice_->edge_count();
  slots_.assign(m, 0);
  fail_.assign(m, 0);
  for (EdgeId e = 0; e < m; ++e) {
    if (params_.model == Model::model3) {
      std::uint32_t n = 0;
      bool success = false;
      while (n < static_cast<std::uint32_t>(params_.n_max)) {
        ++n;
        if (rng.bernoulli(params_.p_s)) {
          success = true;
          break;
        }
      }
      slots_[e] = 2 * n;
      fail_[e] = !success;
    } else if (params_.model == Model::boosted) {
      slots_[e] = 1u << params_.boost_n;
      fail_[e] = rng.bernoulli(1.0 / static_cast<double>(1u << params_.boost_n));
    } else {
      contract("presample only applies to model3 and boosted");
    }
  }
  return finish_presample();
}

inline void PercolationState::prefetch(std::size_t pool_index, int stage) const {
  const std::size_t n = lattice_->node_count();
  NodeId node = 0;
  EdgeId edge = 0;
  bool is_node = false;
  switch (params_.model) {
    case Model::bond: edge = static_cast<EdgeId>(pool_index); break;
    case Model::site:
    case Model::model1: node = static_cast<NodeId>(pool_index); is_node = true; break;
    case Model::model2:
      if (pool_index < n) {
        node = static_cast<NodeId>(pool_index);
        is_node = true;
      } else {
        edge = static_cast<EdgeId>((pool_index - n) / 2);
      }
      break;
    case Model::model2prime: edge = static_cast<EdgeId>(pool_index / 2); break;
    case Model::model3:
    case Model::boosted:
      if (stage == 0) {
        __builtin_prefetch(slot_edge_.data() + pool_index);
        return;
      }
      edge = slot_edge_[pool_index];
      --stage;
      break;
  }
  if (is_node) {
    if (stage == 0) {
      __builtin_prefetch(node_.data() + node);
      lattice_->prefetch_row(node);
      dsu_.prefetch(node);
    } else if (stage == 2) {
      lattice_->prefetch_adjacency(node);
    }
    return;
  }
  if (stage == 0) {
    __builtin_prefetch(count_.data() + edge);
    __builtin_prefetch(edge_.data() + edge);
    __builtin_prefetch(&lattice_->edge(edge));
    return;
  }
  // Photons that do not complete their fusion touch nothing else.
  if (params_.model != Model::bond && count_[edge] + 1 < (needs_presample() ? slots_[edge] : 2u)) return;
  const Edge& e = lattice_->edge(edge);
  if (stage == 1) {
    for (NodeId l : {e.u, e.v}) {
      __builtin_prefetch(node_.data() + l);
      lattice_->prefetch_row(l);
      dsu_.prefetch(l);
    }
  } else if (stage == 2 && params_.model != Model::bond) {
    lattice_->prefetch_adjacency(e.u);
    lattice_->prefetch_adjacency(e.v);
  } else if (stage == 3 && params_.model != Model::bond) {
    for (NodeId l : {e.u, e.v}) {
      const auto nb = lattice_->neighbors(l);
      const auto inc = lattice_->incident_edges(l);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        __builtin_prefetch(node_.data() + nb[k]);
        __builtin_prefetch(edge_.data() + inc[k]);
        dsu_.prefetch(nb[k]);
      }
    }
  }
}

template <class Gen>
void PercolationState::model2_add_fusion_photon(EdgeId edge, Gen& rng) {
  if (params_.model != Model::model2 && params_.model != Model::model2prime) {
    contract("model2_add_fusion_photon needs model2 or model2prime");
  }
  if (count_[edge] >= 2) contract("fusion " + std::to_string(edge) + " already has both photons");
  if (++count_[edge] < 2) return;
  ++draws_;
  edge_[edge] = rng.bernoulli(params_.p_s) ? kEdgeE : kEdgeF;
  resolve_fusion_endpoints(edge);
}

template <class Gen>
void PercolationState::add_photon(std::size_t pool_index, Gen& rng) {
  const std::size_t n = lattice_->node_count();
  switch (params_.model) {
    case Model::bond: add_bond(static_cast<EdgeId>(pool_index)); break;
    case Model::site: add_site(static_cast<NodeId>(pool_index)); break;
    case Model::model1: model1_add_photon(static_cast<NodeId>(pool_index)); break;
    case Model::model2:
      if (pool_index < n) {
        model2_add_central(static_cast<NodeId>(pool_index));
      } else {
        model2_add_fusion_photon(static_cast<EdgeId>((pool_index - n) / 2), rng);
      }
      break;
    case Model::model2prime: model2_add_fusion_photon(static_cast<EdgeId>(pool_index / 2), rng); break;
    case Model::model3:
    case Model::boosted: model3_add_fusion_photon(slot_edge_[pool_index]); break;
  }
}

}  // namespace lossperc
