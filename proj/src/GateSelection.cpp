#include "qccd/GateSelection.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qccd {
namespace {

const std::vector<int> kNoChains{};

}  // namespace

IonPlacement::IonPlacement(const ArchGraph& g, std::vector<int> edgeOfChain)
    : edgeOf_(std::move(edgeOfChain)), at_(g.edgeCount()) {
  for (int chain = 0; chain < chainCount(); ++chain) {
    const int e = edgeOf_[chain];
    if (e < 0 || e >= g.edgeCount())
      throw std::invalid_argument("chain " + std::to_string(chain) +
                                  " references unknown edge " +
                                  std::to_string(e));
    at_[e].push_back(chain);
    const int cap = e == g.processingEdge() ? g.spec().pzCapacity : 1;
    if (static_cast<int>(at_[e].size()) > cap)
      throw std::invalid_argument("edge " + std::to_string(e) +
                                  " holds more than " + std::to_string(cap) +
                                  " chains");
  }
}

int IonPlacement::edgeOf(int chain) const {
  if (chain < 0 || chain >= chainCount())
    throw std::invalid_argument("chain id out of range");
  return edgeOf_[chain];
}

const std::vector<int>& IonPlacement::chainsAt(int edge) const {
  if (edge < 0 || edge >= static_cast<int>(at_.size()))
    throw std::invalid_argument("edge id out of range");
  return at_[edge];
}

int IonPlacement::chainAt(int edge) const {
  const std::vector<int>& cs = chainsAt(edge);
  return cs.empty() ? -1 : cs.front();
}

int IonPlacement::occupancy(int edge) const {
  return static_cast<int>(chainsAt(edge).size());
}

bool IonPlacement::fits(const ArchGraph& g, int edge) const {
  const int cap = edge == g.processingEdge() ? g.spec().pzCapacity : 1;
  return occupancy(edge) < cap;
}

void IonPlacement::moveChain(const ArchGraph& g, int chain, int toEdge) {
  const int from = edgeOf(chain);
  if (toEdge < 0 || toEdge >= static_cast<int>(at_.size()))
    throw std::invalid_argument("edge id out of range");
  if (toEdge == from) return;
  if (!fits(g, toEdge))
    throw std::invalid_argument("edge " + std::to_string(toEdge) +
                                " has no room for chain " +
                                std::to_string(chain));
  std::vector<int>& src = at_[from];
  src.erase(std::find(src.begin(), src.end(), chain));
  std::vector<int>& dst = at_[toEdge];
  dst.insert(std::upper_bound(dst.begin(), dst.end(), chain), chain);
  edgeOf_[chain] = toEdge;
}

void IonPlacement::rotate(const Cycle& cy) {
  const int n = static_cast<int>(cy.edges.size());
  std::vector<int> old(n);
  for (int i = 0; i < n; ++i) old[i] = chainAt(cy.edges[i]);
  for (int i = 0; i < n; ++i) at_[cy.edges[i]].clear();
  for (int i = 0; i < n; ++i) {
    if (old[i] == -1) continue;
    const int to = cy.edges[(i + 1) % n];
    at_[to].push_back(old[i]);
    edgeOf_[old[i]] = to;
  }
}

int bestGate(const std::vector<int>& front, const Circuit& c,
             const IonPlacement& placement, const ArchGraph& g) {
  if (front.empty())
    throw std::invalid_argument("best gate asked for an empty front layer");
  const std::vector<int>& cross = g.distanceToEntry();
  const std::vector<int>& hops = g.hopsToEntry();
  int bestId = -1;
  int bestCross = 0;
  int bestHops = 0;
  for (const int gid : front) {
    int crossSum = 0;
    int hopSum = 0;
    for (const int q : c.gates[gid].qubits) {
      crossSum += cross[placement.edgeOf(q)];
      hopSum += hops[placement.edgeOf(q)];
    }
    if (bestId == -1 || std::tie(crossSum, hopSum, gid) <
                            std::tie(bestCross, bestHops, bestId)) {
      bestId = gid;
      bestCross = crossSum;
      bestHops = hopSum;
    }
  }
  return bestId;
}

PriorityQueue buildPriorityQueue(DependencyGraph dag, const Circuit& c,
                                 const IonPlacement& placement,
                                 const ArchGraph& g, int maxLen) {
  PriorityQueue q;
  q.maxLen = maxLen;
  while (dag.remaining() > 0 &&
         static_cast<int>(q.chains.size()) < maxLen) {
    const int gid = bestGate(dag.frontLayer(), c, placement, g);
    for (const int chain : c.gates[gid].qubits) {
      if (static_cast<int>(q.chains.size()) >= maxLen) break;
      if (q.rankOf(chain) == -1) q.chains.push_back(chain);
    }
    dag.removeNode(gid);
  }
  return q;
}

}  // namespace qccd
