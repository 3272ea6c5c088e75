#include "qccd/Verifier.hpp"

#include <algorithm>
#include <sstream>

#include "qccd/DependencyGraph.hpp"

namespace qccd {

const char* ruleName(Rule r) {
  switch (r) {
    case Rule::Occupancy: return "OCCUPANCY";
    case Rule::JunctionReuse: return "JUNCTION_REUSE";
    case Rule::NonAdjacentMove: return "NON_ADJACENT_MOVE";
    case Rule::GateOrder: return "GATE_ORDER";
    case Rule::GateLocation: return "GATE_LOCATION";
    case Rule::Incomplete: return "INCOMPLETE";
  }
  return "?";
}

namespace {

/// Replay bookkeeping, fully independent of the scheduler's internals.
struct Replay {
  const ArchGraph& g;
  const Circuit& c;
  const SchedulerConfig& cfg;
  std::vector<int> chainEdge;
  std::vector<int> occ;           // per-edge occupancy count
  std::vector<int> finishedAt;    // per-gate finish step, -1 if pending
  int activeGate = -1;
  int activeStart = -1;
  std::vector<char> activeOperand;
  ViolationReport report;

  Replay(const ArchGraph& graph, const Circuit& circuit,
         const IonPlacement& initial, const SchedulerConfig& config)
      : g(graph),
        c(circuit),
        cfg(config),
        chainEdge(initial.edges()),
        occ(graph.edgeCount(), 0),
        finishedAt(circuit.gates.size(), -1),
        activeOperand(initial.chainCount(), 0) {
    for (int e : chainEdge) ++occ[e];
  }

  [[nodiscard]] int capacity(int edge) const {
    return edge == g.processingEdge() ? g.spec().pzCapacity : 1;
  }

  [[nodiscard]] bool failed() const { return !report.ok(); }

  void flag(int step, Rule rule, std::string detail) {
    if (failed()) return;
    report.violations.push_back({step, rule, std::move(detail)});
  }
};

std::string describeMove(const Move& mv) {
  std::ostringstream os;
  os << "chain " << mv.chain << " from edge " << mv.from << " to edge "
     << mv.to;
  return os.str();
}

void checkStructure(const Replay& r, const Schedule& s) {
  const int edges = r.g.edgeCount();
  const int chains = static_cast<int>(r.chainEdge.size());
  const int gates = static_cast<int>(r.c.gates.size());
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    const TimeStep& ts = s.steps[i];
    if (ts.index != static_cast<int>(i))
      throw ScheduleFormatError("step " + std::to_string(i) +
                                " has index " + std::to_string(ts.index));
    for (const Move& mv : ts.moves) {
      if (mv.chain < 0 || mv.chain >= chains)
        throw ScheduleFormatError("move names unknown chain " +
                                  std::to_string(mv.chain));
      if (mv.from < 0 || mv.from >= edges || mv.to < 0 || mv.to >= edges)
        throw ScheduleFormatError("move names unknown edge");
    }
    for (const Cycle& cy : ts.cycles) {
      if (cy.edges.size() < 3)
        throw ScheduleFormatError("cycle with fewer than 3 edges");
      std::vector<int> sorted = cy.edges;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ScheduleFormatError("cycle repeats an edge");
      if (sorted.front() < 0 || sorted.back() >= edges)
        throw ScheduleFormatError("cycle names unknown edge");
    }
    for (int gid : ts.gatesStarted)
      if (gid < 0 || gid >= gates)
        throw ScheduleFormatError("started gate id out of range");
    for (int gid : ts.gatesFinished)
      if (gid < 0 || gid >= gates)
        throw ScheduleFormatError("finished gate id out of range");
  }
}

/// One chain hop. Capacity is enforced immediately for plain moves (they
/// apply sequentially); cycle hops defer it to the post-rotation check so an
/// atomic rotation of a full ring is not flagged for its transient state.
void applyHop(Replay& r, int step, int chain, int from, int to,
              std::vector<int>& majorUse, std::vector<int>& chainCross,
              bool inCycle) {
  const char* what = inCycle ? "cycle rotation" : "move";
  int shared = r.g.sharedNode(from, to);
  if (shared < 0) {
    r.flag(step, Rule::NonAdjacentMove,
           std::string(what) + ": edges " + std::to_string(from) + " and " +
               std::to_string(to) + " are not adjacent");
    return;
  }
  if (!r.g.legalHop(from, to)) {
    r.flag(step, Rule::NonAdjacentMove,
           std::string(what) + ": edge " + std::to_string(from) + " -> " +
               std::to_string(to) + " runs against the one-way interface");
    return;
  }
  if (r.activeGate >= 0 && r.activeOperand[chain]) {
    r.flag(step, Rule::GateLocation,
           "chain " + std::to_string(chain) +
               " moved while its gate is in progress");
    return;
  }
  if (r.g.isMajor(shared)) {
    if (++majorUse[shared] > 1) {
      r.flag(step, Rule::JunctionReuse,
             "junction " + std::to_string(shared) + " crossed twice");
      return;
    }
    if (++chainCross[chain] > 1) {
      r.flag(step, Rule::JunctionReuse,
             "chain " + std::to_string(chain) + " crossed two junctions");
      return;
    }
  }
  --r.occ[from];
  ++r.occ[to];
  r.chainEdge[chain] = to;
  if (!inCycle && r.occ[to] > r.capacity(to))
    r.flag(step, Rule::Occupancy,
           "edge " + std::to_string(to) + " holds " + std::to_string(r.occ[to]) +
               " chains (capacity " + std::to_string(r.capacity(to)) + ")");
}

void replayStep(Replay& r, const TimeStep& ts) {
  const int step = ts.index;
  std::vector<int> majorUse(r.g.nodeCount(), 0);
  std::vector<int> chainCross(r.chainEdge.size(), 0);

  for (const Move& mv : ts.moves) {
    if (r.failed()) return;
    if (r.chainEdge[mv.chain] != mv.from) {
      r.flag(step, Rule::Occupancy,
             describeMove(mv) + ", but the chain is on edge " +
                 std::to_string(r.chainEdge[mv.chain]));
      return;
    }
    applyHop(r, step, mv.chain, mv.from, mv.to, majorUse, chainCross, false);
  }

  for (const Cycle& cy : ts.cycles) {
    if (r.failed()) return;
    const int n = static_cast<int>(cy.edges.size());
    // Occupants are read before the rotation so it applies atomically.
    std::vector<int> occupant(n, -1);
    for (int chain = 0; chain < static_cast<int>(r.chainEdge.size()); ++chain)
      for (int i = 0; i < n; ++i)
        if (r.chainEdge[chain] == cy.edges[i]) {
          if (occupant[i] >= 0) {
            r.flag(step, Rule::Occupancy,
                   "cycle edge " + std::to_string(cy.edges[i]) +
                       " holds more than one chain");
            return;
          }
          occupant[i] = chain;
        }
    for (int i = 0; i < n; ++i) {
      if (r.failed()) return;
      if (occupant[i] < 0) continue;
      applyHop(r, step, occupant[i], cy.edges[i], cy.edges[(i + 1) % n],
               majorUse, chainCross, true);
    }
    for (int e : cy.edges) {
      if (r.failed()) return;
      if (r.occ[e] > r.capacity(e))
        r.flag(step, Rule::Occupancy,
               "edge " + std::to_string(e) + " holds " +
                   std::to_string(r.occ[e]) + " chains after the rotation");
    }
  }

  for (int gid : ts.gatesStarted) {
    if (r.failed()) return;
    if (r.activeGate >= 0) {
      r.flag(step, Rule::GateLocation,
             "gate " + std::to_string(gid) + " started while gate " +
                 std::to_string(r.activeGate) + " is active");
      return;
    }
    if (r.finishedAt[gid] >= 0) {
      r.flag(step, Rule::GateOrder,
             "gate " + std::to_string(gid) + " started after finishing");
      return;
    }
    for (int dep = 0; dep < gid; ++dep)
      if (!gatesCommute(r.c.gates[dep], r.c.gates[gid]) &&
          r.finishedAt[dep] < 0) {
        r.flag(step, Rule::GateOrder,
               "gate " + std::to_string(gid) + " started before gate " +
                   std::to_string(dep));
        return;
      }
    for (int q : r.c.gates[gid].qubits) {
      if (r.chainEdge[q] != r.g.processingEdge() || chainCross[q] > 0) {
        r.flag(step, Rule::GateLocation,
               "gate " + std::to_string(gid) + ": chain " + std::to_string(q) +
                   " is not stationed on the processing edge");
        return;
      }
    }
    r.activeGate = gid;
    r.activeStart = step;
    for (int q : r.c.gates[gid].qubits) r.activeOperand[q] = 1;
  }

  for (int gid : ts.gatesFinished) {
    if (r.failed()) return;
    if (r.activeGate != gid) {
      r.flag(step, Rule::GateLocation,
             "gate " + std::to_string(gid) + " finished but is not active");
      return;
    }
    int duration = operandCount(r.c.gates[gid].kind) == 2 ? r.cfg.duration2q
                                                          : r.cfg.duration1q;
    int elapsed = step - r.activeStart + 1;
    if (elapsed != duration) {
      r.flag(step, Rule::GateLocation,
             "gate " + std::to_string(gid) + " ran " + std::to_string(elapsed) +
                 " steps, duration is " + std::to_string(duration));
      return;
    }
    for (int q : r.c.gates[gid].qubits)
      if (r.chainEdge[q] != r.g.processingEdge()) {
        r.flag(step, Rule::GateLocation,
               "gate " + std::to_string(gid) + ": chain " + std::to_string(q) +
                   " left the processing edge before the gate finished");
        return;
      }
    r.finishedAt[gid] = step;
    for (int q : r.c.gates[gid].qubits) r.activeOperand[q] = 0;
    r.activeGate = -1;
    r.activeStart = -1;
  }
}

}  // namespace

ViolationReport verifySchedule(const ArchGraph& g, const Circuit& c,
                               const IonPlacement& initial, const Schedule& s,
                               const SchedulerConfig& cfg) {
  Replay r(g, c, initial, cfg);
  checkStructure(r, s);
  for (const TimeStep& ts : s.steps) {
    replayStep(r, ts);
    if (r.failed()) return std::move(r.report);
  }
  if (r.activeGate >= 0) {
    r.flag(-1, Rule::Incomplete,
           "gate " + std::to_string(r.activeGate) +
               " is still active when the schedule ends");
    return std::move(r.report);
  }
  int missing = 0;
  int first = -1;
  for (std::size_t gid = 0; gid < r.finishedAt.size(); ++gid)
    if (r.finishedAt[gid] < 0) {
      ++missing;
      if (first < 0) first = static_cast<int>(gid);
    }
  if (missing > 0)
    r.flag(-1, Rule::Incomplete,
           std::to_string(missing) + " gate(s) never finished, first is gate " +
               std::to_string(first));
  return std::move(r.report);
}

}  // namespace qccd
