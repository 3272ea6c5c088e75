#pragma once

#include <vector>

#include "qccd/ArchGraph.hpp"
#include "qccd/Circuit.hpp"
#include "qccd/DependencyGraph.hpp"

namespace qccd {

/// Chain-to-edge occupancy. One chain per edge everywhere except the
/// processing edge, which holds up to pz_capacity chains (ions merged into
/// the processing crystal). Chain ids double as qubit ids (direct mapping).
class IonPlacement {
public:
  IonPlacement() = default;
  IonPlacement(const ArchGraph& g, std::vector<int> edgeOfChain);

  [[nodiscard]] int chainCount() const {
    return static_cast<int>(edgeOf_.size());
  }
  [[nodiscard]] int edgeOf(int chain) const;
  /// Chains on the edge, ascending. Empty vector if unoccupied.
  [[nodiscard]] const std::vector<int>& chainsAt(int edge) const;
  /// Lowest chain id on the edge, or -1.
  [[nodiscard]] int chainAt(int edge) const;
  [[nodiscard]] int occupancy(int edge) const;
  /// True if one more chain fits on the edge.
  [[nodiscard]] bool fits(const ArchGraph& g, int edge) const;

  /// Single-chain move; throws if the target has no room.
  void moveChain(const ArchGraph& g, int chain, int toEdge);
  /// Rotates a cycle one position: the occupant of edges[i] shifts to
  /// edges[i+1], the last wraps to edges[0].
  void rotate(const Cycle& cy);

  /// chain -> edge, indexed by chain id.
  [[nodiscard]] const std::vector<int>& edges() const { return edgeOf_; }

private:
  std::vector<int> edgeOf_;
  std::vector<std::vector<int>> at_;
};

/// Ranked chains that should head for the processing zone next.
struct PriorityQueue {
  std::vector<int> chains;
  int maxLen = 0;

  /// Rank of the chain, or -1 if not enqueued.
  [[nodiscard]] int rankOf(int chain) const {
    for (std::size_t i = 0; i < chains.size(); ++i)
      if (chains[i] == chain) return static_cast<int>(i);
    return -1;
  }
};

/// Front-layer gate whose operand chains have the smallest summed junction
/// distance to the entry edge; ties break to the lowest gate id. Chains in
/// the interface contribute distance 0. Throws std::invalid_argument on an
/// empty front layer.
int bestGate(const std::vector<int>& front, const Circuit& c,
             const IonPlacement& placement, const ArchGraph& g);

/// Repeatedly extracts the best gate from a working copy of the DAG and
/// appends its chains until maxLen chains are enqueued or the DAG is empty.
PriorityQueue buildPriorityQueue(DependencyGraph dag, const Circuit& c,
                                 const IonPlacement& placement,
                                 const ArchGraph& g, int maxLen);

}  // namespace qccd
