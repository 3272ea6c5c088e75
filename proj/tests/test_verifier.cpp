#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "TestSupport.hpp"
#include "qccd/ArchGraph.hpp"
#include "qccd/Circuit.hpp"
#include "qccd/GateSelection.hpp"
#include "qccd/Scheduler.hpp"
#include "qccd/Verifier.hpp"

using qccd::ArchGraph;
using qccd::Circuit;
using qccd::Cycle;
using qccd::Gate;
using qccd::GateKind;
using qccd::GridSpec;
using qccd::IonPlacement;
using qccd::Move;
using qccd::Rule;
using qccd::Schedule;
using qccd::SchedulerConfig;
using qccd::TimeStep;
using qccd::ViolationReport;

namespace {

GridSpec spec(int m, int n, int v, int h) {
  GridSpec s;
  s.m = m;
  s.n = n;
  s.v = v;
  s.h = h;
  return s;
}

Gate mk(int id, GateKind k, std::vector<int> qs, double angle = 0.5) {
  Gate g;
  g.id = id;
  g.kind = k;
  g.qubits = std::move(qs);
  g.angle = angle;
  return g;
}

IonPlacement randomPlacement(const ArchGraph& g, int chains,
                             std::uint64_t seed) {
  std::vector<int> pool(static_cast<std::size_t>(g.memoryEdgeCount()));
  std::iota(pool.begin(), pool.end(), 0);
  std::mt19937_64 rng(seed);
  std::vector<int> edges;
  for (int i = 0; i < chains; ++i) {
    std::uniform_int_distribution<int> pick(i, g.memoryEdgeCount() - 1);
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(pick(rng))]);
    edges.push_back(pool[static_cast<std::size_t>(i)]);
  }
  return IonPlacement(g, edges);
}

/// A one-step schedule holding the given pieces; convenience for hand-built
/// violation scenarios.
Schedule oneStep(std::vector<Move> moves, std::vector<int> started = {},
                 std::vector<int> finished = {}) {
  Schedule s;
  TimeStep ts;
  ts.index = 0;
  ts.moves = std::move(moves);
  ts.gatesStarted = std::move(started);
  ts.gatesFinished = std::move(finished);
  s.steps.push_back(std::move(ts));
  return s;
}

}  // namespace

TEST_CASE("clean schedules and empty circuits verify silently") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));

  SUBCASE("empty schedule for an empty circuit") {
    Circuit c;
    c.qubitCount = 1;
    const IonPlacement p(g, {0});
    CHECK(qccd::verifySchedule(g, c, p, Schedule{}).ok());
  }

  SUBCASE("scheduler output end to end") {
    const Circuit c = qccd::builtinCircuit("fra", 6);
    const IonPlacement p = randomPlacement(g, 6, 5);
    const Schedule s = qccd::runSchedule(g, c, p, SchedulerConfig{});
    const ViolationReport r = qccd::verifySchedule(g, c, p, s);
    CHECK(r.ok());
  }
}

TEST_CASE("moving onto an occupied edge is a single occupancy violation") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));
  Circuit c;
  c.qubitCount = 1;
  // Chains on adjacent edges of the top row; c0 moves onto c1's edge.
  const IonPlacement p(g, {0, 1});
  const Schedule s = oneStep({Move{0, 0, 1}});
  const ViolationReport r = qccd::verifySchedule(g, c, p, s);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].rule == Rule::Occupancy);
  CHECK(r.violations[0].step == 0);
}

TEST_CASE("the one-way interface rejects reverse transitions") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));
  Circuit c;
  c.qubitCount = 1;
  const IonPlacement p(g, {g.processingEdge()});
  const Schedule s = oneStep({Move{0, g.processingEdge(), g.entryEdge()}});
  const ViolationReport r = qccd::verifySchedule(g, c, p, s);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].rule == Rule::NonAdjacentMove);
}

TEST_CASE("gate timing is enforced against the configured durations") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));
  Circuit c;
  c.qubitCount = 2;
  c.gates = {mk(0, GateKind::RZZ, {0, 1})};
  const IonPlacement p(g, {g.processingEdge(), g.processingEdge()});
  SchedulerConfig cfg;
  cfg.duration2q = 3;

  SUBCASE("correct window verifies") {
    Schedule s;
    for (int t = 0; t < 3; ++t) {
      TimeStep ts;
      ts.index = t;
      if (t == 0) ts.gatesStarted = {0};
      if (t == 2) ts.gatesFinished = {0};
      s.steps.push_back(ts);
    }
    CHECK(qccd::verifySchedule(g, c, p, s, cfg).ok());
  }

  SUBCASE("early finish is a timing violation") {
    Schedule s;
    TimeStep t0;
    t0.index = 0;
    t0.gatesStarted = {0};
    TimeStep t1;
    t1.index = 1;
    t1.gatesFinished = {0};
    s.steps = {t0, t1};
    const ViolationReport r = qccd::verifySchedule(g, c, p, s, cfg);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].rule == Rule::GateLocation);
    CHECK(r.violations[0].step == 1);
  }

  SUBCASE("an operand leaving mid-gate is a location violation") {
    Schedule s;
    TimeStep t0;
    t0.index = 0;
    t0.gatesStarted = {0};
    TimeStep t1;
    t1.index = 1;
    t1.moves = {Move{1, g.processingEdge(), g.exitEdge()}};
    s.steps = {t0, t1};
    const ViolationReport r = qccd::verifySchedule(g, c, p, s, cfg);
    REQUIRE(!r.violations.empty());
    CHECK(r.violations[0].rule == Rule::GateLocation);
  }
}

TEST_CASE("structurally malformed schedules raise format errors") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));
  Circuit c;
  c.qubitCount = 1;
  c.gates = {mk(0, GateKind::RX, {0})};
  const IonPlacement p(g, {0});

  SUBCASE("unknown chain id") {
    const Schedule s = oneStep({Move{7, 0, 1}});
    CHECK_THROWS_AS(qccd::verifySchedule(g, c, p, s),
                    qccd::ScheduleFormatError);
  }
  SUBCASE("edge id out of range") {
    const Schedule s = oneStep({Move{0, 0, g.edgeCount()}});
    CHECK_THROWS_AS(qccd::verifySchedule(g, c, p, s),
                    qccd::ScheduleFormatError);
  }
  SUBCASE("gate id out of range") {
    const Schedule s = oneStep({}, {3});
    CHECK_THROWS_AS(qccd::verifySchedule(g, c, p, s),
                    qccd::ScheduleFormatError);
  }
  SUBCASE("degenerate cycle") {
    Schedule s = oneStep({});
    Cycle cy;
    cy.edges = {0, 1};
    s.steps[0].cycles.push_back(cy);
    CHECK_THROWS_AS(qccd::verifySchedule(g, c, p, s),
                    qccd::ScheduleFormatError);
  }
  SUBCASE("step indices must be consecutive") {
    Schedule s = oneStep({});
    s.steps[0].index = 5;
    CHECK_THROWS_AS(qccd::verifySchedule(g, c, p, s),
                    qccd::ScheduleFormatError);
  }
}

TEST_CASE("each rule fires on a dedicated corruption of a clean schedule") {
  const ArchGraph g = ArchGraph::build(spec(3, 3, 1, 1));
  const Circuit c = qccd::builtinCircuit("fra", 6);
  const IonPlacement p = randomPlacement(g, 6, 9);
  const Schedule clean = qccd::runSchedule(g, c, p, SchedulerConfig{});
  REQUIRE(qccd::verifySchedule(g, c, p, clean).ok());

  const auto firstRule = [&](const Schedule& bad) {
    const ViolationReport r = qccd::verifySchedule(g, c, p, bad);
    REQUIRE(!r.violations.empty());
    return r.violations[0].rule;
  };

  SUBCASE("occupancy: replaying a move twice") {
    Schedule bad = clean;
    for (TimeStep& ts : bad.steps)
      if (!ts.moves.empty()) {
        ts.moves.push_back(ts.moves.front());
        break;
      }
    CHECK(firstRule(bad) == Rule::Occupancy);
  }

  SUBCASE("junction reuse: bouncing straight back across a junction") {
    Schedule bad = clean;
    bool done = false;
    for (TimeStep& ts : bad.steps) {
      for (const Move& m : ts.moves) {
        const int n = g.sharedNode(m.from, m.to);
        if (n >= 0 && g.isMajor(n)) {
          ts.moves.push_back(Move{m.chain, m.to, m.from});
          done = true;
          break;
        }
      }
      if (done) break;
    }
    REQUIRE(done);
    CHECK(firstRule(bad) == Rule::JunctionReuse);
  }

  SUBCASE("non-adjacent move: teleporting a chain") {
    Schedule bad = clean;
    for (TimeStep& ts : bad.steps)
      if (!ts.moves.empty()) {
        Move& m = ts.moves.front();
        for (int e = 0; e < g.edgeCount(); ++e)
          if (e != m.from && g.sharedNode(m.from, e) < 0) {
            m.to = e;
            break;
          }
        break;
      }
    CHECK(firstRule(bad) == Rule::NonAdjacentMove);
  }

  SUBCASE("gate order: restarting a finished gate") {
    Schedule bad = clean;
    int gid = -1;
    std::size_t stepAfter = 0;
    for (std::size_t i = 0; i < bad.steps.size(); ++i)
      if (!bad.steps[i].gatesFinished.empty()) {
        gid = bad.steps[i].gatesFinished.front();
        stepAfter = i + 1;
        break;
      }
    REQUIRE(gid >= 0);
    REQUIRE(stepAfter < bad.steps.size());
    std::vector<int>& started = bad.steps[stepAfter].gatesStarted;
    started.insert(started.begin(), gid);
    CHECK(firstRule(bad) == Rule::GateOrder);
  }

  SUBCASE("gate location: finishing a gate that is not running") {
    Schedule bad = clean;
    const int gid = bad.steps.front().gatesFinished.empty()
                        ? 0
                        : bad.steps.front().gatesFinished.front();
    bad.steps.back().gatesFinished.push_back(gid);
    CHECK(firstRule(bad) == Rule::GateLocation);
  }

  SUBCASE("incomplete: truncating the final step") {
    Schedule bad = clean;
    bad.steps.pop_back();
    const ViolationReport r = qccd::verifySchedule(g, c, p, bad);
    REQUIRE(!r.violations.empty());
    CHECK(r.violations[0].rule == Rule::Incomplete);
    CHECK(r.violations[0].step == -1);
  }
}

TEST_CASE("rule names are stable identifiers") {
  CHECK(std::string(qccd::ruleName(Rule::Occupancy)) == "OCCUPANCY");
  CHECK(std::string(qccd::ruleName(Rule::JunctionReuse)) == "JUNCTION_REUSE");
  CHECK(std::string(qccd::ruleName(Rule::NonAdjacentMove)) ==
        "NON_ADJACENT_MOVE");
  CHECK(std::string(qccd::ruleName(Rule::GateOrder)) == "GATE_ORDER");
  CHECK(std::string(qccd::ruleName(Rule::GateLocation)) == "GATE_LOCATION");
  CHECK(std::string(qccd::ruleName(Rule::Incomplete)) == "INCOMPLETE");
}
