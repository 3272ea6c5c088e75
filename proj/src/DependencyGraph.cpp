#include "qccd/DependencyGraph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qccd {
namespace {

bool diagonal(GateKind k) { return k == GateKind::RZ || k == GateKind::RZZ; }

bool sharesQubit(const Gate& a, const Gate& b) {
  for (int qa : a.qubits)
    for (int qb : b.qubits)
      if (qa == qb) return true;
  return false;
}

}  // namespace

bool gatesCommute(const Gate& a, const Gate& b) {
  if (!sharesQubit(a, b)) return true;
  if (diagonal(a.kind) && diagonal(b.kind)) return true;
  if (a.kind == b.kind && a.qubits.size() == 1 && b.qubits.size() == 1)
    return true;
  return false;
}

DependencyGraph DependencyGraph::build(const Circuit& c) {
  validateCircuit(c);
  const int n = static_cast<int>(c.gates.size());
  for (int i = 0; i < n; ++i) {
    if (c.gates[i].id != i)
      throw std::invalid_argument("gate ids must equal positions 0..n-1");
    if (!isNative(c.gates[i].kind))
      throw std::invalid_argument("gate " + std::to_string(i) +
                                  " is not native");
  }
  DependencyGraph g;
  g.gateCount_ = n;
  g.remaining_ = n;
  g.present_.assign(n, 1);
  g.predCount_.assign(n, 0);
  g.succ_.assign(n, {});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!gatesCommute(c.gates[i], c.gates[j])) {
        g.succ_[i].push_back(j);
        ++g.predCount_[j];
      }
  return g;
}

bool DependencyGraph::contains(int gateId) const {
  return gateId >= 0 && gateId < gateCount_ && present_[gateId];
}

const std::vector<int>& DependencyGraph::successors(int gateId) const {
  if (gateId < 0 || gateId >= gateCount_)
    throw std::invalid_argument("gate id out of range");
  return succ_[gateId];
}

int DependencyGraph::predecessorCount(int gateId) const {
  if (gateId < 0 || gateId >= gateCount_)
    throw std::invalid_argument("gate id out of range");
  return predCount_[gateId];
}

std::vector<int> DependencyGraph::frontLayer() const {
  std::vector<int> out;
  for (int i = 0; i < gateCount_; ++i)
    if (present_[i] && predCount_[i] == 0) out.push_back(i);
  return out;
}

void DependencyGraph::removeNode(int gateId) {
  if (!contains(gateId))
    throw std::invalid_argument("gate " + std::to_string(gateId) +
                                " is not in the graph");
  if (predCount_[gateId] != 0)
    throw std::invalid_argument("gate " + std::to_string(gateId) +
                                " still has unfinished predecessors");
  present_[gateId] = 0;
  --remaining_;
  for (int s : succ_[gateId])
    if (present_[s]) --predCount_[s];
}

}  // namespace qccd
