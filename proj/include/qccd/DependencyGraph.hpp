#pragma once

#include <vector>

#include "qccd/Circuit.hpp"

namespace qccd {

/// True iff the two native gates commute under the rules used for
/// dependency tracking: disjoint operands always commute, diagonal gates
/// (RZ, RZZ) commute with each other, and equal-kind one-qubit rotations
/// on the same qubit commute. Everything else is treated as dependent.
bool gatesCommute(const Gate& a, const Gate& b);

/// DAG over a native circuit's gates. Nodes are gate ids; an edge runs
/// from the earlier gate to the later one whenever the pair does not
/// commute. Nodes can be removed front-to-back to replay execution;
/// copies are cheap enough to fork working states.
class DependencyGraph {
public:
  static DependencyGraph build(const Circuit& c);

  [[nodiscard]] int gateCount() const { return gateCount_; }
  [[nodiscard]] int remaining() const { return remaining_; }
  [[nodiscard]] bool contains(int gateId) const;
  [[nodiscard]] const std::vector<int>& successors(int gateId) const;
  [[nodiscard]] int predecessorCount(int gateId) const;

  /// Gate ids with no remaining predecessors, ascending.
  [[nodiscard]] std::vector<int> frontLayer() const;

  /// Removes a front-layer node and unlocks its successors. Throws
  /// std::invalid_argument if the node is absent or still blocked.
  void removeNode(int gateId);

private:
  int gateCount_ = 0;
  int remaining_ = 0;
  std::vector<char> present_;
  std::vector<int> predCount_;
  std::vector<std::vector<int>> succ_;
};

}  // namespace qccd
