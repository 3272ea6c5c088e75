#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "TestSupport.hpp"
#include "qccd/Circuit.hpp"
#include "qccd/DependencyGraph.hpp"
#include "qccd/Qasm.hpp"

namespace ts = qccd::testsupport;
using qccd::Circuit;
using qccd::Gate;
using qccd::GateKind;
using ts::Cx;
using ts::Mat;

namespace {

constexpr double kPi = std::numbers::pi;

Gate mk(int id, GateKind k, std::vector<int> qs, double angle = 0.0) {
  Gate g;
  g.id = id;
  g.kind = k;
  g.qubits = std::move(qs);
  g.angle = angle;
  return g;
}

Circuit circuitOf(int nq, std::vector<Gate> gates) {
  Circuit c;
  c.qubitCount = nq;
  c.gates = std::move(gates);
  return c;
}

int kindCount(const Circuit& c, GateKind k) {
  int n = 0;
  for (const Gate& g : c.gates)
    if (g.kind == k) ++n;
  return n;
}

bool sameGates(const Circuit& a, const Circuit& b) {
  if (a.qubitCount != b.qubitCount) return false;
  if (a.gates.size() != b.gates.size()) return false;
  for (std::size_t i = 0; i < a.gates.size(); ++i) {
    const Gate& x = a.gates[i];
    const Gate& y = b.gates[i];
    if (x.id != y.id || x.kind != y.kind || x.qubits != y.qubits ||
        x.angle != y.angle)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("builtin families have the documented shape") {
  const Circuit fra = qccd::builtinCircuit("fra", 4);
  CHECK(fra.qubitCount == 4);
  REQUIRE(fra.gates.size() == 4);
  for (int q = 0; q < 4; ++q) {
    CHECK(fra.gates[q].kind == GateKind::RX);
    CHECK(fra.gates[q].qubits == std::vector<int>{q});
    CHECK(fra.gates[q].angle == doctest::Approx(kPi));
  }

  const Circuit ghz = qccd::builtinCircuit("ghz", 4);
  REQUIRE(ghz.gates.size() == 4);
  CHECK(ghz.gates[0].kind == GateKind::H);
  CHECK(ghz.gates[0].qubits == std::vector<int>{0});
  for (int q = 1; q < 4; ++q) {
    CHECK(ghz.gates[q].kind == GateKind::CX);
    CHECK(ghz.gates[q].qubits == std::vector<int>{q - 1, q});
  }

  const Circuit ring = qccd::builtinCircuit("graph", 4);
  REQUIRE(ring.gates.size() == 8);
  for (int q = 0; q < 4; ++q) CHECK(ring.gates[q].kind == GateKind::H);
  for (int q = 0; q < 4; ++q) {
    const Gate& g = ring.gates[4 + q];
    CHECK(g.kind == GateKind::CP);
    CHECK(g.qubits == std::vector<int>{q, (q + 1) % 4});
    CHECK(g.angle == doctest::Approx(kPi));
  }
  CHECK(qccd::builtinCircuit("graph", 2).gates.size() == 3);
  CHECK(kindCount(qccd::builtinCircuit("graph", 1), GateKind::CP) == 0);

  const Circuit qft = qccd::builtinCircuit("qft", 3);
  CHECK(kindCount(qft, GateKind::H) == 3);
  CHECK(kindCount(qft, GateKind::CP) == 3);
  CHECK(kindCount(qft, GateKind::SWAP) == 1);
  CHECK(qft.gates.back().kind == GateKind::SWAP);
  CHECK(qft.gates.back().qubits == std::vector<int>{0, 2});
  CHECK(qft.gates[1].angle == doctest::Approx(kPi / 2));
  CHECK(qft.gates[2].angle == doctest::Approx(kPi / 4));

  CHECK_THROWS_AS(qccd::builtinCircuit("bell", 2), std::invalid_argument);
  CHECK_THROWS_AS(qccd::builtinCircuit("fra", 0), std::invalid_argument);
}

TEST_CASE("builtin unitaries match closed forms") {
  const Mat ghz = ts::circuitUnitary(qccd::builtinCircuit("ghz", 2));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(ghz[0][0] - Cx(s, 0)) < 1e-12);
  CHECK(std::abs(ghz[1][0]) < 1e-12);
  CHECK(std::abs(ghz[2][0]) < 1e-12);
  CHECK(std::abs(ghz[3][0] - Cx(s, 0)) < 1e-12);

  Mat xx = ts::matIdentity(4);
  std::reverse(xx.begin(), xx.end());
  CHECK(ts::equalUpToPhase(ts::circuitUnitary(qccd::builtinCircuit("fra", 2)),
                           xx, 1e-12));

  const Mat ring = ts::circuitUnitary(qccd::builtinCircuit("graph", 3));
  const double a = 1.0 / std::sqrt(8.0);
  const double sign[8] = {1, 1, 1, -1, 1, -1, -1, -1};
  for (int x = 0; x < 8; ++x)
    CHECK(std::abs(ring[x][0] - Cx(sign[x] * a, 0)) < 1e-12);

  const int dim = 8;
  const Mat qft = ts::circuitUnitary(qccd::builtinCircuit("qft", 3));
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const double phase = 2.0 * kPi * r * c / dim;
      const Cx want = std::polar(1.0 / std::sqrt(8.0), phase);
      CHECK(std::abs(qft[r][c] - want) < 1e-9);
    }
}

TEST_CASE("circuit validation reports the offending gate") {
  Circuit c = circuitOf(2, {mk(0, GateKind::CX, {1, 1})});
  CHECK_THROWS_WITH_AS(qccd::validateCircuit(c),
                       doctest::Contains("duplicate operand"),
                       std::invalid_argument);
  c = circuitOf(2, {mk(0, GateKind::RX, {0, 1}, 1.0)});
  CHECK_THROWS_WITH_AS(qccd::validateCircuit(c),
                       doctest::Contains("wrong operand count"),
                       std::invalid_argument);
  c = circuitOf(2, {mk(0, GateKind::RX, {2}, 1.0)});
  CHECK_THROWS_WITH_AS(qccd::validateCircuit(c),
                       doctest::Contains("out of range"),
                       std::invalid_argument);
  c = circuitOf(2, {mk(0, GateKind::RX, {0}, 1.0), mk(0, GateKind::RX, {1}, 1.0)});
  CHECK_THROWS_WITH_AS(qccd::validateCircuit(c),
                       doctest::Contains("ids must strictly increase"),
                       std::invalid_argument);
  c = circuitOf(2, {mk(0, GateKind::RX, {0}, std::nan(""))});
  CHECK_THROWS_WITH_AS(qccd::validateCircuit(c),
                       doctest::Contains("non-finite angle"),
                       std::invalid_argument);
}

TEST_CASE("single-gate decompositions reproduce the unitary") {
  const auto check = [](const Circuit& c) {
    const Circuit nat = qccd::decomposeToNative(c);
    for (const Gate& g : nat.gates) CHECK(qccd::isNative(g.kind));
    CHECK(ts::equalUpToPhase(ts::circuitUnitary(c), ts::circuitUnitary(nat),
                             1e-12));
  };
  check(circuitOf(1, {mk(0, GateKind::H, {0})}));
  check(circuitOf(2, {mk(0, GateKind::CX, {0, 1})}));
  check(circuitOf(2, {mk(0, GateKind::CX, {1, 0})}));
  check(circuitOf(2, {mk(0, GateKind::CP, {0, 1}, 1.234)}));
  check(circuitOf(2, {mk(0, GateKind::CP, {1, 0}, -0.4)}));
  check(circuitOf(2, {mk(0, GateKind::H, {1}), mk(1, GateKind::CX, {0, 1}),
                      mk(2, GateKind::CP, {1, 0}, 0.7),
                      mk(3, GateKind::H, {0})}));

  CHECK_THROWS_AS(
      qccd::decomposeToNative(circuitOf(2, {mk(0, GateKind::SWAP, {0, 1})})),
      qccd::UnsupportedFeatureError);
}

TEST_CASE("swap elimination rewires later gates") {
  const Circuit c =
      circuitOf(3, {mk(0, GateKind::SWAP, {0, 1}), mk(1, GateKind::SWAP, {1, 2}),
                    mk(2, GateKind::RX, {2}, 0.5)});
  const qccd::SwapFreeCircuit sf = qccd::eliminateSwaps(c);
  CHECK(sf.wireOf == std::vector<int>{1, 2, 0});
  REQUIRE(sf.circuit.gates.size() == 1);
  CHECK(sf.circuit.gates[0].kind == GateKind::RX);
  CHECK(sf.circuit.gates[0].qubits == std::vector<int>{0});
  CHECK(sf.circuit.gates[0].id == 0);

  const qccd::SwapFreeCircuit qft =
      qccd::eliminateSwaps(qccd::builtinCircuit("qft", 3));
  CHECK(kindCount(qft.circuit, GateKind::SWAP) == 0);
  CHECK(qft.wireOf == std::vector<int>{2, 1, 0});
}

TEST_CASE("swap elimination preserves the unitary modulo the wire map") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 40; ++iter) {
    const Circuit c = ts::randomCircuit(rng, 3, 20, false);
    const qccd::SwapFreeCircuit sf = qccd::eliminateSwaps(c);
    const Mat lhs = ts::circuitUnitary(c);
    const Mat rhs = ts::matMul(ts::permutationOperator(sf.wireOf),
                               ts::circuitUnitary(sf.circuit));
    INFO("iteration ", iter);
    CHECK(ts::maxAbsDiff(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("peephole merges timeline-adjacent equal gates") {
  Circuit c = circuitOf(1, {mk(0, GateKind::RZ, {0}, 0.3),
                            mk(1, GateKind::RZ, {0}, 0.4)});
  Circuit out = qccd::peepholeOptimize(c);
  REQUIRE(out.gates.size() == 1);
  CHECK(out.gates[0].angle == doctest::Approx(0.7));

  // A disjoint gate in between does not break adjacency on the wire.
  c = circuitOf(2, {mk(0, GateKind::RZ, {0}, 0.3), mk(1, GateKind::RX, {1}, 1.0),
                    mk(2, GateKind::RZ, {0}, 0.4)});
  out = qccd::peepholeOptimize(c);
  REQUIRE(out.gates.size() == 2);
  CHECK(out.gates[0].kind == GateKind::RZ);
  CHECK(out.gates[0].angle == doctest::Approx(0.7));

  // A gate touching one operand in between does break adjacency.
  c = circuitOf(2,
                {mk(0, GateKind::RZZ, {0, 1}, 0.3), mk(1, GateKind::RZ, {0}, 0.2),
                 mk(2, GateKind::RZZ, {0, 1}, 0.4)});
  CHECK(qccd::peepholeOptimize(c).gates.size() == 3);

  // Operand order does not matter for two-qubit merges.
  c = circuitOf(2, {mk(0, GateKind::RZZ, {0, 1}, 0.3),
                    mk(1, GateKind::RZZ, {1, 0}, 0.4)});
  out = qccd::peepholeOptimize(c);
  REQUIRE(out.gates.size() == 1);
  CHECK(out.gates[0].angle == doctest::Approx(0.7));

  // Different kinds on the same wire never merge.
  c = circuitOf(1, {mk(0, GateKind::RX, {0}, 0.3), mk(1, GateKind::RY, {0}, 0.2)});
  CHECK(qccd::peepholeOptimize(c).gates.size() == 2);
}

TEST_CASE("peephole drops null rotations and reaches a fixpoint") {
  Circuit c = circuitOf(1, {mk(0, GateKind::RX, {0}, kPi),
                            mk(1, GateKind::RX, {0}, kPi)});
  CHECK(qccd::peepholeOptimize(c).gates.empty());

  c = circuitOf(1, {mk(0, GateKind::RZ, {0}, 0.3), mk(1, GateKind::RZ, {0}, -0.3)});
  CHECK(qccd::peepholeOptimize(c).gates.empty());

  c = circuitOf(1, {mk(0, GateKind::RX, {0}, 2 * kPi - 1e-12)});
  CHECK(qccd::peepholeOptimize(c).gates.empty());

  c = circuitOf(1, {mk(0, GateKind::RX, {0}, 1e-12)});
  CHECK(qccd::peepholeOptimize(c).gates.empty());

  // Cancelling the middle gate makes the outer pair adjacent in a later
  // sweep; everything collapses.
  c = circuitOf(1,
                {mk(0, GateKind::RX, {0}, 0.4), mk(1, GateKind::RY, {0}, 0.3),
                 mk(2, GateKind::RY, {0}, -0.3), mk(3, GateKind::RX, {0}, -0.4)});
  CHECK(qccd::peepholeOptimize(c).gates.empty());

  // Angles are normalized into [0, 2*pi).
  c = circuitOf(1, {mk(0, GateKind::RZ, {0}, -kPi / 2)});
  const Circuit out = qccd::peepholeOptimize(c);
  REQUIRE(out.gates.size() == 1);
  CHECK(out.gates[0].angle == doctest::Approx(3 * kPi / 2));

  CHECK_THROWS_AS(
      qccd::peepholeOptimize(circuitOf(1, {mk(0, GateKind::H, {0})})),
      qccd::UnsupportedFeatureError);
}

TEST_CASE("peephole preserves the unitary up to global phase") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 60; ++iter) {
    const Circuit c = ts::randomCircuit(rng, 3, 20, true);
    const Circuit out = qccd::peepholeOptimize(c);
    INFO("iteration ", iter);
    CHECK(ts::equalUpToPhase(ts::circuitUnitary(c), ts::circuitUnitary(out),
                             1e-7));
    CHECK(sameGates(out, qccd::peepholeOptimize(out)));
    for (std::size_t i = 0; i < out.gates.size(); ++i)
      CHECK(out.gates[i].id == static_cast<int>(i));
  }
}

TEST_CASE("full pipeline is unitary-equivalent modulo phase and wire map") {
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 60; ++iter) {
    const Circuit c = ts::randomCircuit(rng, 3, 30, false);
    const qccd::SwapFreeCircuit sf = qccd::compileToNative(c);
    for (const Gate& g : sf.circuit.gates) CHECK(qccd::isNative(g.kind));
    const Mat lhs = ts::circuitUnitary(c);
    const Mat rhs = ts::matMul(ts::permutationOperator(sf.wireOf),
                               ts::circuitUnitary(sf.circuit));
    INFO("iteration ", iter);
    CHECK(ts::equalUpToPhase(lhs, rhs, 1e-8));
  }
}

TEST_CASE("commutation rules") {
  const Gate rz0 = mk(0, GateKind::RZ, {0}, 0.3);
  const Gate rzz01 = mk(1, GateKind::RZZ, {0, 1}, 0.4);
  const Gate rzz12 = mk(2, GateKind::RZZ, {1, 2}, 0.5);
  const Gate rx0 = mk(3, GateKind::RX, {0}, 0.6);
  const Gate rx0b = mk(4, GateKind::RX, {0}, 0.7);
  const Gate ry1 = mk(5, GateKind::RY, {1}, 0.8);

  CHECK(qccd::gatesCommute(rz0, rzz01));
  CHECK(qccd::gatesCommute(rzz01, rzz12));
  CHECK(qccd::gatesCommute(rx0, rx0b));
  CHECK(qccd::gatesCommute(rx0, ry1));
  CHECK(!qccd::gatesCommute(rx0, rz0));
  CHECK(!qccd::gatesCommute(rx0, rzz01));
  CHECK(!qccd::gatesCommute(ry1, rzz01));
}

TEST_CASE("commuting pairs have vanishing commutator") {
  std::mt19937_64 rng(7);
  int seen = 0;
  while (seen < 100) {
    const Circuit c = ts::randomCircuit(rng, 4, 2, true);
    if (!qccd::gatesCommute(c.gates[0], c.gates[1])) continue;
    ++seen;
    const Mat a = ts::gateMatrix(c.gates[0], 4);
    const Mat b = ts::gateMatrix(c.gates[1], 4);
    CHECK(ts::maxAbsDiff(ts::matMul(a, b), ts::matMul(b, a)) <= 1e-9);
  }
}

TEST_CASE("dependency graph basics") {
  const Circuit c = circuitOf(
      2, {mk(0, GateKind::RZ, {0}, 0.3), mk(1, GateKind::RZZ, {0, 1}, 0.4),
          mk(2, GateKind::RX, {0}, 0.5), mk(3, GateKind::RX, {1}, 0.6)});
  qccd::DependencyGraph dag = qccd::DependencyGraph::build(c);
  CHECK(dag.gateCount() == 4);
  CHECK(dag.remaining() == 4);
  // 0 and 1 are both diagonal; 2 conflicts with both; 3 conflicts with 1.
  CHECK(dag.frontLayer() == std::vector<int>{0, 1});
  CHECK(dag.predecessorCount(2) == 2);
  CHECK(dag.predecessorCount(3) == 1);
  CHECK(dag.successors(0) == std::vector<int>{2});
  CHECK(dag.successors(1) == std::vector<int>{2, 3});

  CHECK_THROWS_AS(dag.removeNode(2), std::invalid_argument);
  dag.removeNode(1);
  CHECK(dag.frontLayer() == std::vector<int>{0, 3});
  CHECK(!dag.contains(1));
  CHECK_THROWS_AS(dag.removeNode(1), std::invalid_argument);
  dag.removeNode(0);
  CHECK(dag.frontLayer() == std::vector<int>{2, 3});
  dag.removeNode(3);
  dag.removeNode(2);
  CHECK(dag.remaining() == 0);
  CHECK(dag.frontLayer().empty());

  CHECK_THROWS_AS(
      qccd::DependencyGraph::build(circuitOf(2, {mk(0, GateKind::CX, {0, 1})})),
      std::invalid_argument);
  Circuit bad = circuitOf(1, {mk(0, GateKind::RX, {0}, 1.0),
                              mk(2, GateKind::RX, {0}, 1.0)});
  CHECK_THROWS_AS(qccd::DependencyGraph::build(bad), std::invalid_argument);
}

TEST_CASE("dependency graph front layer matches a brute-force replay") {
  std::mt19937_64 rng(43);
  for (int iter = 0; iter < 25; ++iter) {
    const Circuit c = ts::randomCircuit(rng, 4, 25, true);
    qccd::DependencyGraph dag = qccd::DependencyGraph::build(c);
    const int n = static_cast<int>(c.gates.size());
    std::vector<char> present(n, 1);
    while (dag.remaining() > 0) {
      std::vector<int> expect;
      for (int i = 0; i < n; ++i) {
        if (!present[i]) continue;
        bool ready = true;
        for (int j = 0; j < i && ready; ++j)
          if (present[j] && !qccd::gatesCommute(c.gates[j], c.gates[i]))
            ready = false;
        if (ready) expect.push_back(i);
      }
      INFO("iteration ", iter, ", remaining ", dag.remaining());
      REQUIRE(dag.frontLayer() == expect);
      const int pick = expect[rng() % expect.size()];
      dag.removeNode(pick);
      present[pick] = 0;
    }
  }
}

TEST_CASE("qasm parses the supported subset") {
  const Circuit c = qccd::parseQasm(
      "OPENQASM 2.0;\n"
      "include \"qelib1.inc\";\n"
      "qreg q[2];\n"
      "rx(pi) q[0];\n"
      "rzz(-pi/4) q[0],q[1];\n"
      "cx q[0],q[1];\n");
  CHECK(c.qubitCount == 2);
  REQUIRE(c.gates.size() == 3);
  CHECK(c.gates[0].kind == GateKind::RX);
  CHECK(c.gates[0].angle == doctest::Approx(kPi));
  CHECK(c.gates[1].kind == GateKind::RZZ);
  CHECK(c.gates[1].qubits == std::vector<int>{0, 1});
  CHECK(c.gates[1].angle == doctest::Approx(-kPi / 4));
  CHECK(c.gates[2].kind == GateKind::CX);

  const Circuit empty = qccd::parseQasm("OPENQASM 2.0;\nqreg q[3];\n");
  CHECK(empty.qubitCount == 3);
  CHECK(empty.gates.empty());
  CHECK(qccd::parseQasm("").qubitCount == 0);

  // Comments, spacing, and compound angle expressions.
  const Circuit ex = qccd::parseQasm(
      "qreg r[2]; // register\n"
      "// a full-line comment\n"
      "rz( 2*pi/8 + 0.5 ) r[ 1 ];\n"
      "ry((1+2)*3) r[0];\n"
      "rx(-pi) r[0];\n"
      "rz(1.5e-3) r[0];\n"
      "cp(--pi) r[0],r[1];\n");
  REQUIRE(ex.gates.size() == 5);
  CHECK(ex.gates[0].angle == doctest::Approx(2 * kPi / 8 + 0.5));
  CHECK(ex.gates[0].qubits == std::vector<int>{1});
  CHECK(ex.gates[1].angle == doctest::Approx(9.0));
  CHECK(ex.gates[2].angle == doctest::Approx(-kPi));
  CHECK(ex.gates[3].angle == doctest::Approx(1.5e-3));
  CHECK(ex.gates[4].angle == doctest::Approx(kPi));
}

TEST_CASE("qasm errors carry positions") {
  try {
    qccd::parseQasm("qreg q[2];\nrx(pi) q[9];\n");
    FAIL("expected QasmError");
  } catch (const qccd::QasmError& e) {
    CHECK(e.line() == 2);
    CHECK(e.col() == 10);
    CHECK(std::string(e.what()).find("out of range") != std::string::npos);
  }
  try {
    qccd::parseQasm("qreg q[2]\nrx(pi) q[0];\n");
    FAIL("expected QasmError");
  } catch (const qccd::QasmError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("expected ';'") != std::string::npos);
  }

  CHECK_THROWS_AS(qccd::parseQasm("rx(pi) q[0];"), qccd::QasmError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; rx(pi) r[0];"), qccd::QasmError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; cx q[0],q[0];"), qccd::QasmError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; h(pi) q[0];"), qccd::QasmError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; rx q[0];"), qccd::QasmError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; rx(pi) q[0],q[1];"),
                  qccd::QasmError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[0];"), qccd::QasmError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; rx(foo) q[0];"),
                  qccd::QasmError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; @"), qccd::QasmError);
  CHECK_THROWS_AS(qccd::parseQasm("include \"unterminated\n"),
                  qccd::QasmError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[1]; OPENQASM 2.0;"),
                  qccd::QasmError);
}

TEST_CASE("qasm rejects features outside the subset") {
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; creg c[2];"),
                  qccd::UnsupportedFeatureError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; measure q[0] -> c[0];"),
                  qccd::UnsupportedFeatureError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; barrier q;"),
                  qccd::UnsupportedFeatureError);
  CHECK_THROWS_AS(qccd::parseQasm("gate foo a { }"),
                  qccd::UnsupportedFeatureError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; reset q[0];"),
                  qccd::UnsupportedFeatureError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; u3(0,0,0) q[0];"),
                  qccd::UnsupportedFeatureError);
  CHECK_THROWS_AS(qccd::parseQasm("qreg q[2]; qreg r[2];"),
                  qccd::UnsupportedFeatureError);
  CHECK_THROWS_AS(qccd::parseQasm("OPENQASM 3.0;\nqreg q[1];"),
                  qccd::UnsupportedFeatureError);
}

TEST_CASE("qasm round-trips circuits exactly") {
  std::mt19937_64 rng(59);
  const auto roundTrip = [](const Circuit& c) {
    const Circuit back = qccd::parseQasm(qccd::toQasm(c));
    return sameGates(c, back);
  };
  CHECK(roundTrip(qccd::builtinCircuit("qft", 4)));
  CHECK(roundTrip(qccd::builtinCircuit("ghz", 5)));
  CHECK(roundTrip(qccd::builtinCircuit("graph", 6)));
  CHECK(roundTrip(qccd::builtinCircuit("fra", 3)));
  for (int iter = 0; iter < 30; ++iter)
    CHECK(roundTrip(ts::randomCircuit(rng, 5, 25, false)));

  const std::string text = qccd::toQasm(qccd::builtinCircuit("qft", 3));
  CHECK(text.find("OPENQASM 2.0;") == 0);
  CHECK(text.find("qreg q[3];") != std::string::npos);
  CHECK(text.find("swap q[0],q[2];") != std::string::npos);
}
