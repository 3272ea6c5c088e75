#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qccd/ArchGraph.hpp"
#include "qccd/Circuit.hpp"
#include "qccd/DependencyGraph.hpp"
#include "qccd/GateSelection.hpp"

namespace qccd {

struct SchedulerConfig {
  int duration1q = 1;  ///< time steps a 1q gate occupies the processing zone
  int duration2q = 1;
  int maxQueueLen = 0;  ///< priority-queue cap; <=0 selects pz_capacity + 2
  bool recomputeQueueEachStep = false;  ///< default: only after each gate
  long long maxStepsGuard = 0;  ///< abort bound; <=0 selects 50*gates*diameter
};

/// One chain hopping between adjacent edges. Moves within a TimeStep are
/// ordered so that sequential application always finds the target edge free.
struct Move {
  int chain = -1;
  int from = -1;
  int to = -1;
  bool operator==(const Move&) const = default;
};

struct TimeStep {
  int index = 0;
  std::vector<Move> moves;
  std::vector<Cycle> cycles;  ///< rotated atomically after the moves
  std::vector<int> gatesStarted;
  std::vector<int> gatesFinished;
};

struct Schedule {
  std::vector<TimeStep> steps;
  int gatesExecuted = 0;
  std::vector<long long> chainCrossings;  ///< junction crossings per chain

  /// Total time steps (the schedule length).
  [[nodiscard]] int tHat() const { return static_cast<int>(steps.size()); }
};

class LivelockError : public std::runtime_error {
public:
  LivelockError(const std::string& what, long long step, int remainingGates)
      : std::runtime_error(what), step_(step), remaining_(remainingGates) {}
  [[nodiscard]] long long step() const { return step_; }
  [[nodiscard]] int remainingGates() const { return remaining_; }

private:
  long long step_;
  int remaining_;
};

/// Mutable mid-run state, exposed so single steps can be driven in tests.
struct SystemState {
  IonPlacement placement;
  DependencyGraph dag;
  PriorityQueue queue;
  int activeGate = -1;       ///< gate currently in the processing zone
  int activeRemaining = 0;   ///< steps left on the active gate
  int targetGate = -1;       ///< gate the processing zone is being filled for;
                             ///< pinned until the queue is rebuilt so chains
                             ///< of different gates cannot interleave into
                             ///< the zone and deadlock it
  long long clock = 0;
  std::vector<long long> crossings;  ///< junction crossings tallied per chain
};

/// Chains allowed to advance this step: the rank-0 chain always, a lower
/// rank only if every chain ranked before it is strictly closer (junction
/// distance) to the entry edge.
std::vector<int> eligibleMovers(const PriorityQueue& queue,
                                const IonPlacement& placement,
                                const ArchGraph& g);

/// Greedy conflict resolution over cycle proposals, ascending rank. A cycle
/// survives iff its edges avoid every already-claimed edge and its corner
/// junctions avoid every already-claimed major node (claims seeded by the
/// accepted plain crossings, then extended by each accepted cycle).
std::vector<Cycle> resolveCycleConflicts(
    const ArchGraph& g, std::vector<std::pair<Cycle, int>> proposals,
    const std::vector<int>& claimedEdges, const std::vector<int>& claimedMajors);

/// Flush the chain on the exit edge into the memory zone: breadth-first
/// search for a free memory edge starting at the entry junction when the
/// chain is needed in the processing zone again, else at the farthest
/// junction; every chain on the path advances one edge (emitted head-first).
/// Throws SaturationError when no memory edge is free.
std::vector<Move> processingZoneTransit(const ArchGraph& g,
                                        const IonPlacement& placement,
                                        bool neededAgain);

/// Builds the initial SystemState: validates the instance (native circuit,
/// qubit count <= chain count, 2q gates need pz_capacity >= 2), performs the
/// upfront saturation check (movement required but no free memory edge), and
/// fills the priority queue.
SystemState makeSystemState(const ArchGraph& g, const Circuit& c,
                            const IonPlacement& initial,
                            const SchedulerConfig& cfg);

/// Advances one time step in place and returns its record. Phases: exit
/// flush through the processing zone, interface advancement, memory-zone
/// movement in priority order (slides, junction crossings, conflict cycles,
/// each claiming its resources), cycle rotation, then end-of-step gate
/// bookkeeping (start, then timer decrement/finish) and queue recompute.
TimeStep advanceTimeStep(SystemState& state, const ArchGraph& g,
                         const Circuit& c, const SchedulerConfig& cfg);

/// Runs the full loop until every gate has finished. Deterministic given
/// (g, c, initial, cfg). Throws LivelockError when the step guard trips and
/// SaturationError when a required free edge does not exist.
Schedule runSchedule(const ArchGraph& g, const Circuit& c,
                     const IonPlacement& initial, const SchedulerConfig& cfg);

}  // namespace qccd
