#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "qccd/ArchGraph.hpp"
#include "qccd/Circuit.hpp"
#include "qccd/GateSelection.hpp"
#include "qccd/Oracle.hpp"
#include "qccd/Scheduler.hpp"
#include "qccd/Verifier.hpp"

using qccd::ArchGraph;
using qccd::Circuit;
using qccd::GridSpec;
using qccd::IonPlacement;
using qccd::OracleBudgetError;
using qccd::OracleConfig;
using qccd::OracleResult;
using qccd::SaturationError;
using qccd::Schedule;
using qccd::SchedulerConfig;
using qccd::TimeStep;

namespace {

GridSpec spec(int m, int n, int v, int h) {
  GridSpec s;
  s.m = m;
  s.n = n;
  s.v = v;
  s.h = h;
  return s;
}

bool sameStep(const TimeStep& a, const TimeStep& b) {
  if (a.index != b.index || a.moves != b.moves ||
      a.gatesStarted != b.gatesStarted || a.gatesFinished != b.gatesFinished ||
      a.cycles.size() != b.cycles.size())
    return false;
  for (std::size_t i = 0; i < a.cycles.size(); ++i)
    if (a.cycles[i].edges != b.cycles[i].edges ||
        a.cycles[i].chain != b.cycles[i].chain)
      return false;
  return true;
}

bool sameSchedule(const Schedule& a, const Schedule& b) {
  if (a.gatesExecuted != b.gatesExecuted ||
      a.chainCrossings != b.chainCrossings || a.steps.size() != b.steps.size())
    return false;
  for (std::size_t i = 0; i < a.steps.size(); ++i)
    if (!sameStep(a.steps[i], b.steps[i])) return false;
  return true;
}

/// Checks the witness against the independent rule verifier and its claimed
/// optimal length.
void checkWitness(const ArchGraph& g, const IonPlacement& initial,
                  const OracleResult& res, int duration = 1) {
  Circuit c;
  if (initial.chainCount() > 0)
    c = qccd::builtinCircuit("fra", initial.chainCount());
  SchedulerConfig cfg;
  cfg.duration1q = duration;
  REQUIRE(static_cast<int>(res.witness.steps.size()) == res.tMin);
  const auto report = qccd::verifySchedule(g, c, initial, res.witness, cfg);
  std::string detail =
      report.ok() ? std::string("clean") : report.violations.front().detail;
  REQUIRE_MESSAGE(report.ok(), detail);
}

}  // namespace

TEST_CASE("oracle: zero chains need zero steps") {
  const ArchGraph g = ArchGraph::build(spec(2, 2, 1, 1));
  const IonPlacement empty(g, {});
  const OracleResult res = qccd::optimalScheduleLength(g, empty);
  CHECK(res.tMin == 0);
  CHECK(res.witness.steps.empty());
  CHECK(res.statesExplored == 1);
  checkWitness(g, empty, res);
}

TEST_CASE("oracle: chain already on the processing edge finishes in one step") {
  const ArchGraph g = ArchGraph::build(spec(2, 2, 1, 1));
  const IonPlacement p(g, {g.processingEdge()});
  const OracleResult res = qccd::optimalScheduleLength(g, p);
  CHECK(res.tMin == 1);
  REQUIRE(res.witness.steps.size() == 1);
  CHECK(res.witness.steps[0].gatesStarted == std::vector<int>{0});
  CHECK(res.witness.steps[0].gatesFinished == std::vector<int>{0});
  checkWitness(g, p, res);
}

TEST_CASE("oracle: chain on the entry edge advances and runs in one step") {
  const ArchGraph g = ArchGraph::build(spec(2, 2, 1, 1));
  const IonPlacement p(g, {g.entryEdge()});
  const OracleResult res = qccd::optimalScheduleLength(g, p);
  CHECK(res.tMin == 1);
  checkWitness(g, p, res);
}

TEST_CASE("oracle: hand-checked single-chain distances on the 2x2 grid") {
  // Entry hangs off the top-right junction: edge 0 (top row) touches it, the
  // bottom row edge is two crossings away, and a chain parked on the exit
  // edge must loop around through memory.
  const ArchGraph g = ArchGraph::build(spec(2, 2, 1, 1));
  struct Case {
    int edge;
    int want;
  };
  const Case cases[] = {
      {0, 2},               // beside the entry junction
      {1, 3},               // opposite row
      {g.exitEdge(), 3},    // rejoin through memory
  };
  for (const Case& c : cases) {
    CAPTURE(c.edge);
    const IonPlacement p(g, {c.edge});
    const OracleResult res = qccd::optimalScheduleLength(g, p);
    CHECK(res.tMin == c.want);
    checkWitness(g, p, res);
  }
}

TEST_CASE("oracle: two chains beside the entry junction serialize gates") {
  const ArchGraph g = ArchGraph::build(spec(2, 2, 1, 1));
  const IonPlacement p(g, {0, 3});
  const OracleResult res = qccd::optimalScheduleLength(g, p);
  CHECK(res.tMin == 3);
  checkWitness(g, p, res);
}

TEST_CASE("oracle: longer gate duration extends the window") {
  const ArchGraph g = ArchGraph::build(spec(2, 2, 1, 1));
  OracleConfig cfg;

  cfg.duration1q = 3;
  const IonPlacement one(g, {0});
  const OracleResult r1 = qccd::optimalScheduleLength(g, one, cfg);
  CHECK(r1.tMin == 4);  // reach entry, admit and start, then two more steps
  checkWitness(g, one, r1, cfg.duration1q);

  cfg.duration1q = 2;
  const IonPlacement two(g, {0, 3});
  const OracleResult r2 = qccd::optimalScheduleLength(g, two, cfg);
  CHECK(r2.tMin == 5);  // gates cannot overlap or chain start-to-finish
  checkWitness(g, two, r2, cfg.duration1q);
}

TEST_CASE("oracle: repeated runs are identical") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));
  const IonPlacement p = qccd::randomPlacement(g, 6, 7);
  const OracleResult a = qccd::optimalScheduleLength(g, p);
  const OracleResult b = qccd::optimalScheduleLength(g, p);
  CHECK(a.tMin == b.tMin);
  CHECK(a.statesExplored == b.statesExplored);
  CHECK(sameSchedule(a.witness, b.witness));
}

TEST_CASE("oracle: parallel and serial expansion agree exactly") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));
  const IonPlacement p = qccd::randomPlacement(g, 6, 3);
  OracleConfig par;
  par.parallel = true;
  OracleConfig ser;
  ser.parallel = false;
  const OracleResult a = qccd::optimalScheduleLength(g, p, par);
  const OracleResult b = qccd::optimalScheduleLength(g, p, ser);
  CHECK(a.tMin == b.tMin);
  CHECK(a.statesExplored == b.statesExplored);
  CHECK(sameSchedule(a.witness, b.witness));
}

TEST_CASE("oracle: witnesses verify and bound the greedy scheduler") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    CAPTURE(seed);
    const IonPlacement p = qccd::randomPlacement(g, 6, seed);
    const OracleResult res = qccd::optimalScheduleLength(g, p);
    // Gates serialize one per step and no memory chain can reach the
    // processing edge and run within the first step.
    CHECK(res.tMin >= 7);
    checkWitness(g, p, res);
    const Circuit c = qccd::builtinCircuit("fra", 6);
    const Schedule greedy = qccd::runSchedule(g, c, p, SchedulerConfig{});
    CHECK(greedy.tHat() >= res.tMin);
  }
}

TEST_CASE("oracle: uniform random placements are well-formed") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));
  const int mem = g.memoryEdgeCount();
  REQUIRE(mem == 12);
  std::vector<int> hits(mem, 0);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const IonPlacement p =
        qccd::randomPlacement(g, 6, static_cast<std::uint64_t>(d));
    std::set<int> used;
    for (int c = 0; c < p.chainCount(); ++c) {
      const int e = p.edgeOf(c);
      REQUIRE(e < mem);
      REQUIRE(used.insert(e).second);
      ++hits[e];
    }
  }
  // Each edge holds a chain in half of the draws: mean 5000, sigma 50.
  for (int e = 0; e < mem; ++e) {
    CAPTURE(e);
    CHECK(std::abs(hits[e] - 5000) <= 150);
  }
  // Seeded determinism.
  const IonPlacement a = qccd::randomPlacement(g, 6, 42);
  const IonPlacement b = qccd::randomPlacement(g, 6, 42);
  for (int c = 0; c < 6; ++c) CHECK(a.edgeOf(c) == b.edgeOf(c));
}

TEST_CASE("oracle: state budget error carries diagnostics") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));
  const IonPlacement p = qccd::randomPlacement(g, 6, 1);
  OracleConfig cfg;
  cfg.stateBudget = 100;
  try {
    qccd::optimalScheduleLength(g, p, cfg);
    FAIL("expected the state budget to be exhausted");
  } catch (const OracleBudgetError& e) {
    CHECK(e.statesExplored() > 100);
    CHECK(e.frontierSize() > 0);
    CHECK(e.depth() >= 1);
    CHECK(std::string(e.what()).find("budget") != std::string::npos);
  }
}

TEST_CASE("oracle: fully saturated register reports no schedule") {
  const ArchGraph g = ArchGraph::build(spec(2, 2, 1, 1));
  // Every memory edge, the whole interface, and both processing slots are
  // occupied: the two processing chains run their gates, after which nothing
  // can move and the remaining gates are unreachable.
  const IonPlacement p(g, {0, 1, 2, 3, g.entryEdge(), g.processingEdge(),
                           g.processingEdge(), g.exitEdge()});
  CHECK_THROWS_AS(qccd::optimalScheduleLength(g, p), SaturationError);
}

TEST_CASE("oracle: rejects instances that do not fit the packed state") {
  const ArchGraph big = ArchGraph::build(spec(4, 4, 1, 2));
  const IonPlacement p = qccd::randomPlacement(big, 4, 1);
  CHECK_THROWS_AS(qccd::optimalScheduleLength(big, p), std::invalid_argument);

  const ArchGraph g = ArchGraph::build(spec(2, 2, 1, 1));
  const IonPlacement q(g, {0});
  OracleConfig cfg;
  cfg.duration1q = 0;
  CHECK_THROWS_AS(qccd::optimalScheduleLength(g, q, cfg),
                  std::invalid_argument);
  cfg.duration1q = 16;
  CHECK_THROWS_AS(qccd::optimalScheduleLength(g, q, cfg),
                  std::invalid_argument);
  cfg.duration1q = 1;
  cfg.stateBudget = 0;
  CHECK_THROWS_AS(qccd::optimalScheduleLength(g, q, cfg),
                  std::invalid_argument);
}

TEST_CASE("oracle: placement bounds are validated") {
  const ArchGraph g = ArchGraph::build(spec(2, 2, 1, 1));
  CHECK_THROWS_AS(qccd::randomPlacement(g, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(qccd::randomPlacement(g, -1, 1), std::invalid_argument);
  CHECK(qccd::randomPlacement(g, 4, 1).chainCount() == 4);
}
