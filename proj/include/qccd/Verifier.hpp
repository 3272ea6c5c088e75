#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qccd/ArchGraph.hpp"
#include "qccd/Circuit.hpp"
#include "qccd/GateSelection.hpp"
#include "qccd/Scheduler.hpp"

namespace qccd {

/// Structural problems (out-of-range ids, inconsistent indices) are reported
/// as exceptions, distinct from rule violations found in a well-formed
/// schedule.
class ScheduleFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Rule : std::uint8_t {
  Occupancy,        ///< a chain is not where a move claims, or an edge overfills
  JunctionReuse,    ///< a junction crossed twice in one step, or one chain
                    ///< crossing twice
  NonAdjacentMove,  ///< move endpoints not adjacent, or against the one-way
                    ///< interface
  GateOrder,        ///< gate started before a dependency finished, or twice
  GateLocation,     ///< gate timing/placement: operands not stationed on the
                    ///< processing edge for the whole window, overlapping
                    ///< gates, or duration mismatch
  Incomplete        ///< not every circuit gate finished exactly once
};

[[nodiscard]] const char* ruleName(Rule r);

struct Violation {
  int step = -1;  ///< -1 for the end-of-schedule completeness check
  Rule rule = Rule::Occupancy;
  std::string detail;
};

struct ViolationReport {
  std::vector<Violation> violations;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Replays the schedule step by step against an independent model of the
/// physical rules: moves applied sequentially (target must have room when
/// applied), cycles rotated atomically afterwards, at most one crossing per
/// junction and per chain per step, one-way interface, gate starts/finishes
/// consistent with the dependency order, operands stationed on the
/// processing edge for every step of a gate's duration window. Stops at the
/// first violation. Throws ScheduleFormatError for structurally malformed
/// schedules. `cfg` supplies the gate durations the schedule was built with.
ViolationReport verifySchedule(const ArchGraph& g, const Circuit& c,
                               const IonPlacement& initial, const Schedule& s,
                               const SchedulerConfig& cfg = SchedulerConfig{});

}  // namespace qccd
