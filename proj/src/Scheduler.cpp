#include "qccd/Scheduler.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <sstream>

namespace qccd {

namespace {

int gateDuration(const SchedulerConfig& cfg, const Circuit& c, int gate) {
  return operandCount(c.gates[gate].kind) == 2 ? cfg.duration2q
                                               : cfg.duration1q;
}

int effectiveQueueLen(const ArchGraph& g, const SchedulerConfig& cfg) {
  return cfg.maxQueueLen > 0 ? cfg.maxQueueLen : g.spec().pzCapacity + 2;
}

bool neededByRemaining(const DependencyGraph& dag, const Circuit& c,
                       int chain) {
  for (int id = 0; id < dag.gateCount(); ++id) {
    if (!dag.contains(id)) continue;
    for (int q : c.gates[id].qubits)
      if (q == chain) return true;
  }
  return false;
}

/// Shortest path from the exit edge into the memory zone (first hop crosses
/// the exit junction, all further hops stay on memory edges), minimizing
/// junction crossings, then hops, ties by edge id. The restriction to memory
/// edges keeps the flush train out of the one-way interface.
std::vector<int> memoryPathFromExit(const ArchGraph& g, int target) {
  struct Item {
    int cross, hops, edge;
    bool operator>(const Item& o) const {
      return std::tie(cross, hops, edge) > std::tie(o.cross, o.hops, o.edge);
    }
  };
  const int kInf = std::numeric_limits<int>::max();
  std::vector<int> bestCross(g.edgeCount(), kInf), bestHops(g.edgeCount(), kInf);
  std::vector<int> parent(g.edgeCount(), -1);
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const int start = g.exitEdge();
  bestCross[start] = 0;
  bestHops[start] = 0;
  pq.push({0, 0, start});
  while (!pq.empty()) {
    Item it = pq.top();
    pq.pop();
    if (it.cross != bestCross[it.edge] || it.hops != bestHops[it.edge])
      continue;
    if (it.edge == target) break;
    const Edge& e = g.edge(it.edge);
    for (int node : {e.a, e.b}) {
      for (int next : g.edgesAt(node)) {
        if (next == it.edge) continue;
        if (g.edge(next).tag != EdgeTag::Memory) continue;
        if (!g.legalHop(it.edge, next)) continue;
        int cross = it.cross + (g.isMajor(node) ? 1 : 0);
        int hops = it.hops + 1;
        if (std::tie(cross, hops) <
            std::tie(bestCross[next], bestHops[next])) {
          bestCross[next] = cross;
          bestHops[next] = hops;
          parent[next] = it.edge;
          pq.push({cross, hops, next});
        }
      }
    }
  }
  if (bestCross[target] == kInf)
    throw SaturationError("no path from the exit edge to a free memory edge");
  std::vector<int> path;
  for (int e = target; e != -1; e = parent[e]) path.push_back(e);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<int> claimedList(const std::vector<char>& flags) {
  std::vector<int> out;
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (flags[i]) out.push_back(static_cast<int>(i));
  return out;
}

/// Per-step working context. claimedEdge (every edge touched by a move or
/// an accepted cycle) gates cycle acceptance only; plain moves go by live
/// occupancy plus cycleEdge (edges owned by an accepted rotation), which
/// keeps follow-the-leader trains within a step legal. claimedMajor makes
/// junction use exclusive across everything.
struct StepCtx {
  std::vector<char> claimedEdge;
  std::vector<char> cycleEdge;
  std::vector<char> claimedMajor;
  std::vector<char> moved;
  std::vector<char> crossedMajor;  ///< chains that crossed a junction

  StepCtx(const ArchGraph& g, int chains)
      : claimedEdge(g.edgeCount(), 0),
        cycleEdge(g.edgeCount(), 0),
        claimedMajor(g.nodeCount(), 0),
        moved(chains, 0),
        crossedMajor(chains, 0) {}
};

/// Applies one hop: updates the placement, claims both edges (and the major
/// if one is crossed), tallies the crossing, and records the move.
void emitMove(SystemState& st, const ArchGraph& g, StepCtx& ctx, TimeStep& ts,
              int chain, int from, int to) {
  st.placement.moveChain(g, chain, to);
  ctx.claimedEdge[from] = 1;
  ctx.claimedEdge[to] = 1;
  ctx.moved[chain] = 1;
  int shared = g.sharedNode(from, to);
  if (g.isMajor(shared)) {
    ctx.claimedMajor[shared] = 1;
    ctx.crossedMajor[chain] = 1;
    ++st.crossings[chain];
  }
  ts.moves.push_back({chain, from, to});
}

}  // namespace

std::vector<int> eligibleMovers(const PriorityQueue& queue,
                                const IonPlacement& placement,
                                const ArchGraph& g) {
  const std::vector<int>& dist = g.distanceToEntry();
  std::vector<int> out;
  int runningMax = -1;
  for (std::size_t k = 0; k < queue.chains.size(); ++k) {
    int chain = queue.chains[k];
    int d = dist[placement.edgeOf(chain)];
    if (k == 0 || d > runningMax) out.push_back(chain);
    runningMax = std::max(runningMax, d);
  }
  return out;
}

std::vector<Cycle> resolveCycleConflicts(
    const ArchGraph& g, std::vector<std::pair<Cycle, int>> proposals,
    const std::vector<int>& claimedEdges,
    const std::vector<int>& claimedMajors) {
  std::sort(proposals.begin(), proposals.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  std::vector<char> ce(g.edgeCount(), 0), cm(g.nodeCount(), 0);
  for (int e : claimedEdges) ce[e] = 1;
  for (int m : claimedMajors) cm[m] = 1;
  std::vector<Cycle> out;
  for (auto& [cy, rank] : proposals) {
    const int n = static_cast<int>(cy.edges.size());
    bool ok = true;
    std::vector<int> majors;
    for (int i = 0; i < n && ok; ++i) {
      int e = cy.edges[i];
      if (ce[e]) ok = false;
      int shared = g.sharedNode(e, cy.edges[(i + 1) % n]);
      if (g.isMajor(shared)) {
        if (cm[shared]) ok = false;
        majors.push_back(shared);
      }
    }
    if (!ok) continue;
    for (int e : cy.edges) ce[e] = 1;
    for (int m : majors) cm[m] = 1;
    out.push_back(std::move(cy));
  }
  return out;
}

std::vector<Move> processingZoneTransit(const ArchGraph& g,
                                        const IonPlacement& placement,
                                        bool neededAgain) {
  int exiting = placement.chainAt(g.exitEdge());
  if (exiting < 0)
    throw std::invalid_argument("no chain occupies the exit edge");
  std::vector<bool> occupied(g.edgeCount(), false);
  for (int e = 0; e < g.memoryEdgeCount(); ++e)
    occupied[e] = placement.occupancy(e) > 0;
  int start = neededAgain ? g.entryJunction() : g.farthestJunction();
  int target = freeEdgeSearch(g, occupied, start);
  std::vector<int> path = memoryPathFromExit(g, target);
  std::vector<Move> out;
  for (int i = static_cast<int>(path.size()) - 2; i >= 0; --i) {
    int chain = placement.chainAt(path[i]);
    if (chain >= 0) out.push_back({chain, path[i], path[i + 1]});
  }
  return out;
}

SystemState makeSystemState(const ArchGraph& g, const Circuit& c,
                            const IonPlacement& initial,
                            const SchedulerConfig& cfg) {
  if (cfg.duration1q < 1 || cfg.duration2q < 1)
    throw std::invalid_argument("gate durations must be >= 1");
  SystemState st;
  st.dag = DependencyGraph::build(c);
  if (c.qubitCount > initial.chainCount()) {
    std::ostringstream os;
    os << "circuit uses " << c.qubitCount << " qubits but the placement has "
       << initial.chainCount() << " chains";
    throw std::invalid_argument(os.str());
  }
  bool movementRequired = false;
  for (const Gate& gate : c.gates) {
    if (operandCount(gate.kind) == 2 && g.spec().pzCapacity < 2)
      throw std::invalid_argument(
          "two-qubit gates need processing-zone capacity >= 2");
    for (int q : gate.qubits)
      if (initial.edgeOf(q) != g.processingEdge()) movementRequired = true;
  }
  if (movementRequired) {
    bool anyFree = false;
    for (int e = 0; e < g.memoryEdgeCount() && !anyFree; ++e)
      anyFree = initial.occupancy(e) == 0;
    if (!anyFree)
      throw SaturationError(
          "every memory edge is occupied and movement is required");
  }
  st.placement = initial;
  st.queue = buildPriorityQueue(st.dag, c, st.placement, g,
                                effectiveQueueLen(g, cfg));
  std::vector<int> front = st.dag.frontLayer();
  st.targetGate = front.empty() ? -1 : bestGate(front, c, st.placement, g);
  st.crossings.assign(initial.chainCount(), 0);
  return st;
}

TimeStep advanceTimeStep(SystemState& st, const ArchGraph& g, const Circuit& c,
                         const SchedulerConfig& cfg) {
  TimeStep ts;
  ts.index = static_cast<int>(st.clock);
  StepCtx ctx(g, st.placement.chainCount());
  const int chains = st.placement.chainCount();
  const int procEdge = g.processingEdge();

  // Front-layer context at the step boundary. The active gate stays in the
  // DAG until it finishes, so it is excluded from "upcoming" bookkeeping.
  std::vector<int> front = st.dag.frontLayer();
  std::vector<char> frontOperand(chains, 0), activeOperand(chains, 0);
  std::vector<int> pendingFront;
  for (int gid : front) {
    if (gid == st.activeGate) continue;
    pendingFront.push_back(gid);
    for (int q : c.gates[gid].qubits) frontOperand[q] = 1;
  }
  if (st.activeGate >= 0)
    for (int q : c.gates[st.activeGate].qubits) activeOperand[q] = 1;
  std::vector<char> targetOperand(chains, 0);
  if (st.targetGate >= 0)
    for (int q : c.gates[st.targetGate].qubits) targetOperand[q] = 1;

  // Pre-estimate of the gate that will start this step, used only to
  // freeze its operands: chains staged at the boundary must not be moved
  // out from under their gate. The actual start decision happens at the
  // end of the step against post-move placement.
  int pendingStart = -1;
  if (st.activeGate < 0) {
    for (int gid : pendingFront) {
      bool staged = true;
      for (int q : c.gates[gid].qubits)
        staged = staged && st.placement.edgeOf(q) == procEdge;
      if (staged) {
        pendingStart = gid;
        break;
      }
    }
  }
  auto pendingStartOperand = [&](int chain) {
    if (pendingStart < 0) return false;
    for (int q : c.gates[pendingStart].qubits)
      if (q == chain) return true;
    return false;
  };
  auto frozen = [&](int chain) {
    return activeOperand[chain] || pendingStartOperand(chain);
  };
  // Eviction policy for the processing zone. Chains no upcoming gate needs
  // always leave. Operands of pending gates other than the target are kept
  // (they pipeline the next gate) unless the zone is blocked: too full for
  // the target gate's missing operands. Lazy eviction keeps the zone
  // drainable without churning chains that are about to be used.
  int missingOfTarget = 0;
  if (st.targetGate >= 0)
    for (int q : c.gates[st.targetGate].qubits)
      if (st.placement.edgeOf(q) != procEdge) ++missingOfTarget;
  const bool zoneBlocked =
      missingOfTarget >
      g.spec().pzCapacity - st.placement.occupancy(procEdge);
  auto exitBound = [&](int chain) {
    if (activeOperand[chain] || pendingStartOperand(chain) ||
        targetOperand[chain])
      return false;
    return !frontOperand[chain] || zoneBlocked;
  };

  // Phase 1: flush the exit edge into the memory zone. The whole train
  // advances one edge, head-first; a claimed junction truncates the tail.
  if (st.placement.chainAt(g.exitEdge()) >= 0) {
    int exiting = st.placement.chainAt(g.exitEdge());
    bool again = neededByRemaining(st.dag, c, exiting);
    for (const Move& mv : processingZoneTransit(g, st.placement, again)) {
      int shared = g.sharedNode(mv.from, mv.to);
      if (g.isMajor(shared) && ctx.claimedMajor[shared]) break;
      emitMove(st, g, ctx, ts, mv.chain, mv.from, mv.to);
    }
  }

  // Phase 2: interface advancement. Processing -> exit for one evictable
  // chain, then entry -> processing whenever a slot is free.
  if (st.placement.chainAt(g.exitEdge()) < 0) {
    for (int chain : st.placement.chainsAt(procEdge)) {
      if (!exitBound(chain) || ctx.moved[chain]) continue;
      emitMove(st, g, ctx, ts, chain, procEdge, g.exitEdge());
      break;
    }
  }
  // The entry edge always drains when the zone has room: refusing a chain
  // here could park it forever in front of the operands the target gate is
  // waiting for. A wrongly admitted chain is evicted by the policy above.
  if (int chain = st.placement.chainAt(g.entryEdge());
      chain >= 0 && !ctx.moved[chain] && st.placement.fits(g, procEdge)) {
    emitMove(st, g, ctx, ts, chain, g.entryEdge(), procEdge);
  }

  // Phase 3: memory-zone movement, one eligible chain at a time in strict
  // priority order. Each chain slides within its segment as far as free
  // edges allow, then crosses its next junction if the way is clear, or
  // requests a conflict-resolution cycle. Every action claims its edges and
  // junctions, so a lower-priority chain can never preempt a higher one.
  std::vector<int> eligible = eligibleMovers(st.queue, st.placement, g);
  auto inInterface = [&](int edge) {
    return g.edge(edge).tag != EdgeTag::Memory;
  };
  std::vector<Cycle> surviving;
  for (int chain : eligible) {
    if (ctx.moved[chain] || frozen(chain)) continue;
    int cur = st.placement.edgeOf(chain);
    if (inInterface(cur)) continue;
    if (ctx.cycleEdge[cur]) continue;  // carried by an accepted cycle

    // First slide within the segment as far as free edges allow.
    bool slid = false;
    std::vector<int> path;
    int next = -1;
    while (true) {
      path = shortestPathEdges(g, cur, g.entryEdge());
      if (path.size() < 2) break;
      next = path[1];
      if (g.isMajor(g.sharedNode(cur, next))) break;
      if (st.placement.occupancy(next) > 0 || ctx.cycleEdge[next]) break;
      emitMove(st, g, ctx, ts, chain, cur, next);
      slid = true;
      cur = next;
    }
    if (path.size() < 2) continue;

    // Then the junction action: cross if the way is clear, otherwise
    // request a conflict-resolution cycle. Chains that slid settle for the
    // slide instead of rotating; cycles never run through the interface.
    int shared = g.sharedNode(cur, next);
    int junction = -1;
    Direction heading = Direction::North;
    if (g.isMajor(shared)) {
      if (st.placement.occupancy(next) == 0 && !ctx.cycleEdge[next] &&
          !ctx.claimedMajor[shared]) {
        emitMove(st, g, ctx, ts, chain, cur, next);
        continue;
      }
      if (inInterface(next) || slid) continue;
      junction = shared;
      heading = g.directionAcross(shared, next);
    } else {
      if (slid) continue;  // blocked mid-segment after sliding: wait
      // Blocked inside the segment: rotate the rectangle containing it. The
      // heading follows the segment toward the blocking neighbour.
      const Edge& ce = g.edge(cur);
      const Segment& seg = g.segment(ce.segment);
      bool fwd = g.edge(next).posInSegment > ce.posInSegment;
      if (seg.orient == Orientation::Horizontal)
        heading = fwd ? Direction::East : Direction::West;
      else
        heading = fwd ? Direction::South : Direction::North;
      junction = fwd ? seg.junctionB : seg.junctionA;
    }
    try {
      Cycle cy = findCycle(g, cur, junction, heading);
      cy.chain = chain;
      std::vector<Cycle> fit = resolveCycleConflicts(
          g, {{std::move(cy), 0}}, claimedList(ctx.claimedEdge),
          claimedList(ctx.claimedMajor));
      if (fit.empty()) continue;  // clashes with a higher-priority action
      for (int e : fit.front().edges) {
        ctx.claimedEdge[e] = 1;
        ctx.cycleEdge[e] = 1;
      }
      const int n = static_cast<int>(fit.front().edges.size());
      for (int i = 0; i < n; ++i) {
        int m = g.sharedNode(fit.front().edges[i],
                             fit.front().edges[(i + 1) % n]);
        if (g.isMajor(m)) ctx.claimedMajor[m] = 1;
      }
      surviving.push_back(std::move(fit.front()));
    } catch (const NoCycleError&) {
      // No legal cycle here; the chain waits for the next step.
    }
  }

  // Phase 4: rotate the accepted cycles (atomic, after all moves).
  for (const Cycle& cy : surviving) {
    const int n = static_cast<int>(cy.edges.size());
    for (int i = 0; i < n; ++i) {
      int chain = st.placement.chainAt(cy.edges[i]);
      if (chain < 0) continue;
      ctx.moved[chain] = 1;
      int shared = g.sharedNode(cy.edges[i], cy.edges[(i + 1) % n]);
      if (g.isMajor(shared)) {
        ctx.crossedMajor[chain] = 1;
        ++st.crossings[chain];
      }
    }
    st.placement.rotate(cy);
    ts.cycles.push_back(cy);
  }

  // End of step: gate start, then timer decrement and finish. A gate may
  // start when every operand sits on the processing edge now and none of
  // them crossed a junction this step: a chain admitted through the minor
  // interface node still counts as stationed, a chain that crossed into
  // the interface does not. A duration-1 gate starts and finishes here.
  bool finished = false;
  if (st.activeGate < 0) {
    for (int gid : pendingFront) {
      bool staged = true;
      for (int q : c.gates[gid].qubits)
        staged = staged && st.placement.edgeOf(q) == procEdge &&
                 !ctx.crossedMajor[q];
      if (staged) {
        st.activeGate = gid;
        st.activeRemaining = gateDuration(cfg, c, gid);
        ts.gatesStarted.push_back(gid);
        break;
      }
    }
  }
  if (st.activeGate >= 0 && --st.activeRemaining == 0) {
    ts.gatesFinished.push_back(st.activeGate);
    st.dag.removeNode(st.activeGate);
    st.activeGate = -1;
    finished = true;
  }
  if (finished || cfg.recomputeQueueEachStep) {
    st.queue = buildPriorityQueue(st.dag, c, st.placement, g,
                                  effectiveQueueLen(g, cfg));
    std::vector<int> newFront = st.dag.frontLayer();
    st.targetGate =
        newFront.empty() ? -1 : bestGate(newFront, c, st.placement, g);
  }
  ++st.clock;
  return ts;
}

Schedule runSchedule(const ArchGraph& g, const Circuit& c,
                     const IonPlacement& initial, const SchedulerConfig& cfg) {
  SystemState st = makeSystemState(g, c, initial, cfg);
  const int gates = static_cast<int>(c.gates.size());
  long long guard = cfg.maxStepsGuard > 0
                        ? cfg.maxStepsGuard
                        : 50LL * gates * std::max(1, g.diameter());
  Schedule out;
  out.chainCrossings.assign(initial.chainCount(), 0);
  while (st.dag.remaining() > 0) {
    if (st.clock >= guard) {
      std::ostringstream os;
      os << "no progress after " << st.clock << " time steps; "
         << st.dag.remaining() << " gates remain";
      throw LivelockError(os.str(), st.clock, st.dag.remaining());
    }
    out.steps.push_back(advanceTimeStep(st, g, c, cfg));
  }
  out.gatesExecuted = gates;
  out.chainCrossings = st.crossings;
  return out;
}

}  // namespace qccd
