#include "lossperc/models.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace lossperc {

std::string_view to_string(Model model) {
  switch (model) {
    case Model::bond: return "bond";
    case Model::site: return "site";
    case Model::model1: return "model1";
    case Model::model2: return "model2";
    case Model::model2prime: return "model2prime";
    case Model::model3: return "model3";
    case Model::boosted: return "boosted";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  for (auto m : {Model::bond, Model::site, Model::model1, Model::model2, Model::model2prime,
                 Model::model3, Model::boosted}) {
    if (name == to_string(m)) return m;
  }
  if (name == "model2'" || name == "model2p") return Model::model2prime;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

void ModelParams::check() const {
  if (!(p_s >= 0.0 && p_s <= 1.0)) throw std::invalid_argument("p_s must lie in [0, 1]");
  if (n_max < 1 || n_max > 1000) throw std::invalid_argument("n_max must lie in [1, 1000]");
  if (boost_n < 1 || boost_n > 16) throw std::invalid_argument("boost_n must lie in [1, 16]");
}

OutcomeProbabilities adaptive_probs(double eta, int n_max, double p_s) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  if (!(p_s >= 0.0 && p_s <= 1.0)) throw std::invalid_argument("p_s must lie in [0, 1]");
  // alpha is the probability of one attempt failing without loss.
  const double eta2 = eta * eta;
  const double alpha = eta2 * (1.0 - p_s);
  const double alpha_n = std::pow(alpha, n_max);
  const double geometric = alpha == 1.0 ? static_cast<double>(n_max) : (1.0 - alpha_n) / (1.0 - alpha);
  OutcomeProbabilities p{};
  p.failure = alpha_n;
  p.success = eta2 * p_s * geometric;
  p.loss = std::max(0.0, 1.0 - p.failure - p.success);
  return p;
}

OutcomeProbabilities boosted_probs(double eta, int boost_n) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  if (boost_n < 1 || boost_n > 16) throw std::invalid_argument("boost_n must lie in [1, 16]");
  const double photons = std::ldexp(1.0, boost_n);
  const double all_present = std::pow(eta, photons);
  return {all_present / photons, all_present * (1.0 - 1.0 / photons), 1.0 - all_present};
}

PercolationState::PercolationState(const Lattice& lattice, const ModelParams& params)
    : lattice_(&lattice), params_(params) {
  params_.check();
  reset();
}

void PercolationState::reset() {
  const std::size_t n = lattice_->node_count();
  const std::size_t m = lattice_->edge_count();
  dsu_.reset(n);
  edge_.assign(m, kEdgeL);
  count_.assign(m, 0);
  draws_ = 0;
  switch (params_.model) {
    case Model::bond:
      node_.assign(n, kE);
      for (NodeId i = 0; i < n; ++i) dsu_.activate(i, lattice_->face_min(i), lattice_->face_max(i));
      break;
    case Model::site:
    case Model::model1:
    case Model::model2:
      node_.assign(n, kL);
      break;
    case Model::model2prime:
    case Model::model3:
    case Model::boosted:
      // Emitter centres are never lost; they join the graph once none of
      // their fusions is lossy, which holds from the start for isolated nodes.
      node_.assign(n, kMZ);
      for (NodeId i = 0; i < n; ++i) {
        if (lattice_->degree(i) == 0) add_node(i, true);
      }
      break;
  }
}

void PercolationState::set_slots(EdgeId edge, std::uint32_t slots, bool all_fail) {
  if (!needs_presample()) contract("set_slots only applies to model3 and boosted");
  const std::size_t m = lattice_->edge_count();
  if (slots_.size() != m) {
    slots_.assign(m, 2);
    fail_.assign(m, 0);
  }
  if (slots == 0) contract("a fusion needs at least one photon slot");
  slots_.at(edge) = slots;
  fail_.at(edge) = all_fail;
}

std::size_t PercolationState::finish_presample() {
  slot_edge_.clear();
  for (EdgeId e = 0; e < slots_.size(); ++e) slot_edge_.insert(slot_edge_.end(), slots_[e], e);
  reset();
  return slot_edge_.size();
}

std::size_t PercolationState::photon_count() const {
  const std::size_t n = lattice_->node_count();
  const std::size_t m = lattice_->edge_count();
  switch (params_.model) {
    case Model::bond: return m;
    case Model::site:
    case Model::model1: return n;
    case Model::model2: return n + 2 * m;
    case Model::model2prime: return 2 * m;
    case Model::model3:
    case Model::boosted: return slot_edge_.size();
  }
  return 0;
}

std::uint32_t PercolationState::required_photons(EdgeId edge) const {
  if (needs_presample()) return slots_.empty() ? 0 : slots_[edge];
  return 2;
}

void PercolationState::contract(const std::string& what) const { throw std::logic_error(what); }

void PercolationState::add_node(NodeId j, bool fusion_edges_only) {
  node_[j] = kE;
  dsu_.activate(j, lattice_->face_min(j), lattice_->face_max(j));
  const auto nb = lattice_->neighbors(j);
  const auto inc = lattice_->incident_edges(j);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    if (node_[nb[k]] != kE) continue;
    if (fusion_edges_only && edge_[inc[k]] != kEdgeE) continue;
    dsu_.unite(j, nb[k]);
  }
}

bool PercolationState::no_lost_neighbor(NodeId j) const {
  for (NodeId k : lattice_->neighbors(j)) {
    if (node_[k] == kL) return false;
  }
  return true;
}

bool PercolationState::no_lost_incident_edge(NodeId j) const {
  for (EdgeId e : lattice_->incident_edges(j)) {
    if (edge_[e] == kEdgeL) return false;
  }
  return true;
}

// Activation condition shared by Algorithms 2a and 2b: no lost centre joined
// to j by a successful fusion, then no lossy fusion on j.
bool PercolationState::fusion_ready(NodeId j) const {
  if (params_.model != Model::model2) return no_lost_incident_edge(j);
  const auto nb = lattice_->neighbors(j);
  const auto inc = lattice_->incident_edges(j);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    if (node_[nb[k]] == kL && edge_[inc[k]] == kEdgeE) return false;
  }
  return no_lost_incident_edge(j);
}

void PercolationState::try_activate_fusion_node(NodeId j) {
  if (node_[j] == kMZ && fusion_ready(j)) add_node(j, true);
}

void PercolationState::resolve_fusion_endpoints(EdgeId edge) {
  const Edge& e = lattice_->edge(edge);
  for (NodeId l : {e.u, e.v}) {
    if (node_[l] != kL) try_activate_fusion_node(l);
  }
}

void PercolationState::add_bond(EdgeId edge) {
  if (params_.model != Model::bond) contract("add_bond needs the bond model");
  if (edge_[edge] != kEdgeL) contract("bond " + std::to_string(edge) + " added twice");
  edge_[edge] = kEdgeE;
  const Edge& e = lattice_->edge(edge);
  dsu_.unite(e.u, e.v);
}

void PercolationState::add_site(NodeId node) {
  if (params_.model != Model::site) contract("add_site needs the site model");
  if (node_[node] != kL) contract("site " + std::to_string(node) + " added twice");
  add_node(node, false);
}

void PercolationState::model1_add_photon(NodeId i) {
  if (params_.model != Model::model1) contract("model1_add_photon needs model1");
  if (node_[i] != kL) contract("qubit " + std::to_string(i) + " is not lost");
  node_[i] = kMZ;
  // Candidates: i itself, then every neighbour waiting on a Z measurement.
  if (no_lost_neighbor(i)) add_node(i, false);
  for (NodeId j : lattice_->neighbors(i)) {
    if (node_[j] == kMZ && no_lost_neighbor(j)) add_node(j, false);
  }
}

void PercolationState::model2_add_central(NodeId i) {
  if (params_.model != Model::model2) contract("model2_add_central needs model2");
  if (node_[i] != kL) contract("central qubit " + std::to_string(i) + " is not lost");
  node_[i] = kMZ;
  try_activate_fusion_node(i);
  const auto nb = lattice_->neighbors(i);
  const auto inc = lattice_->incident_edges(i);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    if (node_[nb[k]] == kMZ && edge_[inc[k]] == kEdgeE) try_activate_fusion_node(nb[k]);
  }
}

void PercolationState::model3_add_fusion_photon(EdgeId edge) {
  if (!needs_presample()) contract("model3_add_fusion_photon needs model3 or boosted");
  if (slots_.empty()) contract("fusion attempts were not presampled");
  if (count_[edge] >= slots_[edge]) contract("fusion " + std::to_string(edge) + " already complete");
  if (++count_[edge] < slots_[edge]) return;
  edge_[edge] = fail_[edge] ? kEdgeF : kEdgeE;
  const Edge& e = lattice_->edge(edge);
  for (NodeId l : {e.u, e.v}) {
    if (node_[l] == kMZ && no_lost_incident_edge(l)) add_node(l, true);
  }
}

bool PercolationState::check_consistency(std::string* why) const {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  const Lattice& g = *lattice_;
  const std::size_t n = g.node_count();

  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (params_.model == Model::bond || params_.model == Model::site || params_.model == Model::model1) break;
    const bool complete = count_[e] >= required_photons(e);
    if ((edge_[e] == kEdgeL) == complete) {
      return fail("edge " + std::to_string(e) + " label disagrees with its photon counter");
    }
  }

  for (NodeId j = 0; j < n; ++j) {
    const std::uint8_t q = node_[j];
    bool expect_exists = false;
    switch (params_.model) {
      case Model::bond:
        if (q != kE) return fail("bond model node not present");
        expect_exists = true;
        break;
      case Model::site:
        if (q == kMZ) return fail("site model node labelled measure_z");
        expect_exists = q == kE;
        break;
      case Model::model1:
        expect_exists = q != kL && no_lost_neighbor(j);
        break;
      case Model::model2:
      case Model::model2prime:
        if (q == kL && params_.model == Model::model2prime) return fail("emitter centre labelled lost");
        expect_exists = q != kL && fusion_ready(j);
        break;
      case Model::model3:
      case Model::boosted:
        if (q == kL) return fail("emitter centre labelled lost");
        expect_exists = no_lost_incident_edge(j);
        break;
    }
    if (q != kL && (q == kE) != expect_exists) {
      return fail("node " + std::to_string(j) + " label violates the update rule");
    }
    if (dsu_.active(j) != (q == kE)) return fail("node " + std::to_string(j) + " forest membership mismatch");
  }

  DisjointSet forest = dsu_;
  const bool any_edge = params_.model == Model::site || params_.model == Model::model1;
  std::vector<std::uint8_t> seen(n, 0);
  std::size_t largest = 0;
  bool spanning = false;
  std::deque<NodeId> queue;
  for (NodeId s = 0; s < n; ++s) {
    if (node_[s] != kE || seen[s]) continue;
    const NodeId root = forest.find(s);
    std::size_t size = 0;
    bool touch_min = false, touch_max = false;
    seen[s] = 1;
    queue.push_back(s);
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop_front();
      ++size;
      touch_min |= g.face_min(v);
      touch_max |= g.face_max(v);
      if (forest.find(v) != root) return fail("forest splits a connected component");
      const auto nb = g.neighbors(v);
      const auto inc = g.incident_edges(v);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const NodeId w = nb[k];
        if (seen[w] || node_[w] != kE) continue;
        if (!any_edge && edge_[inc[k]] != kEdgeE) continue;
        seen[w] = 1;
        queue.push_back(w);
      }
    }
    if (forest.component_size(root) != size) return fail("forest merges separate components");
    largest = std::max(largest, size);
    spanning |= touch_min && touch_max;
  }
  if (largest != dsu_.largest_size()) return fail("largest component size mismatch");
  if (spanning != dsu_.spanning()) return fail("spanning flag mismatch");
  return true;
}

}  // namespace lossperc
