#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lossperc/lattice.hpp"

namespace lossperc {

/// Weighted union-find with path compression over a fixed node set in which
/// nodes start absent and are activated one by one. Each root carries its
/// component size and whether the component touches the min/max boundary
/// faces, so spanning is known in O(1) after every union.
///
/// Encoding: parent[i] >= 0 is a parent pointer; a root stores -size; absent
/// nodes hold kAbsent.
class DisjointSet {
 public:
  static constexpr std::int32_t kAbsent = std::numeric_limits<std::int32_t>::min();
  static constexpr std::uint8_t kTouchMin = 1;
  static constexpr std::uint8_t kTouchMax = 2;

  explicit DisjointSet(std::size_t node_count = 0) { reset(node_count); }

  void reset(std::size_t node_count) {
    if (node_count > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
      throw std::invalid_argument("too many nodes for DisjointSet");
    }
    parent_.assign(node_count, kAbsent);
    touch_.assign(node_count, 0);
    largest_ = 0;
    active_ = 0;
    spanning_ = false;
  }

  std::size_t node_count() const { return parent_.size(); }
  std::size_t active_count() const { return active_; }
  std::size_t largest_size() const { return largest_; }
  bool spanning() const { return spanning_; }
  bool active(NodeId node) const { return parent_[node] != kAbsent; }
  void prefetch(NodeId node) const {
    __builtin_prefetch(parent_.data() + node);
    __builtin_prefetch(touch_.data() + node);
  }

  void activate(NodeId node, bool touches_min, bool touches_max) {
    if (node >= parent_.size()) throw std::out_of_range("node id out of range");
    if (parent_[node] != kAbsent) {
      throw std::logic_error("node " + std::to_string(node) + " activated twice");
    }
    parent_[node] = -1;
    touch_[node] = static_cast<std::uint8_t>((touches_min ? kTouchMin : 0) | (touches_max ? kTouchMax : 0));
    ++active_;
    if (largest_ < 1) largest_ = 1;
    if (touch_[node] == (kTouchMin | kTouchMax)) spanning_ = true;
  }

  NodeId find(NodeId node) {
    require_active(node);
    NodeId root = node;
    while (parent_[root] >= 0) root = static_cast<NodeId>(parent_[root]);
    while (parent_[node] >= 0) {
      const auto next = static_cast<NodeId>(parent_[node]);
      parent_[node] = static_cast<std::int32_t>(root);
      node = next;
    }
    return root;
  }

  /// Merges the components of a and b and returns the surviving root. The
  /// smaller tree hangs below the larger; on equal sizes the lower root id
  /// survives.
  NodeId unite(NodeId a, NodeId b) {
    NodeId ra = find(a);
    NodeId rb = find(b);
    if (ra == rb) return ra;
    const std::int32_t sa = -parent_[ra];
    const std::int32_t sb = -parent_[rb];
    if (sa < sb || (sa == sb && rb < ra)) std::swap(ra, rb);
    parent_[ra] = -(sa + sb);
    parent_[rb] = static_cast<std::int32_t>(ra);
    touch_[ra] |= touch_[rb];
    if (static_cast<std::size_t>(sa + sb) > largest_) largest_ = static_cast<std::size_t>(sa + sb);
    if (touch_[ra] == (kTouchMin | kTouchMax)) spanning_ = true;
    return ra;
  }

  /// Size of the component containing `node`.
  std::size_t component_size(NodeId node) { return static_cast<std::size_t>(-parent_[find(node)]); }

  /// Boundary flags of the component containing `node`.
  std::uint8_t touch_flags(NodeId node) { return touch_[find(node)]; }

  /// Raw parent entry, for inspection in tests.
  std::int32_t raw_parent(NodeId node) const { return parent_[node]; }

 private:
  void require_active(NodeId node) const {
    if (node >= parent_.size()) throw std::out_of_range("node id out of range");
    if (parent_[node] == kAbsent) {
      throw std::logic_error("node " + std::to_string(node) + " is not active");
    }
  }

  std::vector<std::int32_t> parent_;
  std::vector<std::uint8_t> touch_;
  std::size_t largest_ = 0;
  std::size_t active_ = 0;
  bool spanning_ = false;
};

}  // namespace lossperc
