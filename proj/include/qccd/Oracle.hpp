#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "qccd/ArchGraph.hpp"
#include "qccd/GateSelection.hpp"
#include "qccd/Scheduler.hpp"

namespace qccd {

/// Limits and knobs for the exact search.
struct OracleConfig {
  long long stateBudget = 10'000'000;  ///< distinct states before giving up
  int duration1q = 1;                  ///< steps one register-access gate runs
  bool parallel = true;                ///< expand frontiers with OpenMP
};

/// Exact answer plus a machine-checkable certificate.
struct OracleResult {
  int tMin = 0;
  Schedule witness;  ///< verifier-clean schedule of exactly tMin steps
  long long statesExplored = 0;
};

/// The state budget ran out before the search finished.
class OracleBudgetError : public std::runtime_error {
public:
  OracleBudgetError(const std::string& what, long long statesExplored,
                    long long frontierSize, int depth)
      : std::runtime_error(what),
        states_(statesExplored),
        frontier_(frontierSize),
        depth_(depth) {}
  [[nodiscard]] long long statesExplored() const { return states_; }
  [[nodiscard]] long long frontierSize() const { return frontier_; }
  [[nodiscard]] int depth() const { return depth_; }

private:
  long long states_;
  long long frontier_;
  int depth_;
};

/// Minimal number of time steps in which every chain of `initial` can run one
/// single-qubit gate (full register access), over the same legality rules the
/// verifier enforces: free intra-segment slides (order-preserving), one
/// junction crossing per chain and per junction per step, the one-way
/// entry/processing/exit pass with its capacities, and gates on chains that
/// are stationed on the processing edge. Breadth-first search over canonical
/// system states (chain identities are interchangeable, so states quotient to
/// occupancy-by-status); the witness schedule is reconstructed from parent
/// links and passes the verifier with exactly tMin steps.
///
/// Preconditions: the memory zone packs into the 64-bit state (at most 24
/// memory edges, processing-zone capacity at most 7) and the gate duration
/// fits the packed timer (1..15). Throws OracleBudgetError when the
/// visited-state budget is exhausted and SaturationError when no schedule
/// reaches full register access. Results are deterministic and identical for
/// the parallel and serial expanders.
OracleResult optimalScheduleLength(const ArchGraph& g,
                                   const IonPlacement& initial,
                                   const OracleConfig& cfg = OracleConfig{});

/// Uniform placement of `chainCount` chains on distinct memory edges, from a
/// seeded deterministic generator. Interface edges are never occupied.
IonPlacement randomPlacement(const ArchGraph& g, int chainCount,
                             std::uint64_t seed);

}  // namespace qccd
