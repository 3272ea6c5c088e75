#include "qccd/Circuit.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace qccd {
namespace {

constexpr double kPi = std::numbers::pi;

void pushGate(Circuit& c, GateKind k, std::vector<int> qubits, double angle) {
  Gate g;
  g.id = static_cast<int>(c.gates.size());
  g.kind = k;
  g.qubits = std::move(qubits);
  g.angle = angle;
  c.gates.push_back(std::move(g));
}

// H == i * RY(pi/2) * RZ(pi), so the gate order on the wire is RZ then RY.
void emitH(Circuit& c, int q) {
  pushGate(c, GateKind::RZ, {q}, kPi);
  pushGate(c, GateKind::RY, {q}, kPi / 2);
}

// CP(t) == exp(i*t/4) * RZ(t/2)@a * RZ(t/2)@b * RZZ(-t/2)@(a,b).
void emitCP(Circuit& c, int a, int b, double theta) {
  pushGate(c, GateKind::RZ, {a}, theta / 2);
  pushGate(c, GateKind::RZ, {b}, theta / 2);
  pushGate(c, GateKind::RZZ, {a, b}, -theta / 2);
}

// CX(ctl, tgt) == H@tgt * CP(pi) * H@tgt up to global phase.
void emitCX(Circuit& c, int ctl, int tgt) {
  emitH(c, tgt);
  emitCP(c, ctl, tgt, kPi);
  emitH(c, tgt);
}

double normalizeAngle(double a) {
  double x = std::fmod(a, 2 * kPi);
  if (x < 0) x += 2 * kPi;
  return x;
}

bool sameOperands(const Gate& a, const Gate& b) {
  if (a.qubits.size() != b.qubits.size()) return false;
  if (a.qubits.size() == 1) return a.qubits[0] == b.qubits[0];
  return (a.qubits[0] == b.qubits[0] && a.qubits[1] == b.qubits[1]) ||
         (a.qubits[0] == b.qubits[1] && a.qubits[1] == b.qubits[0]);
}

}  // namespace

bool isNative(GateKind k) {
  return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ ||
         k == GateKind::RZZ;
}

int operandCount(GateKind k) {
  switch (k) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::H: return 1;
    case GateKind::RZZ:
    case GateKind::CX:
    case GateKind::CP:
    case GateKind::SWAP: return 2;
  }
  return 0;
}

bool isParameterized(GateKind k) {
  return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ ||
         k == GateKind::RZZ || k == GateKind::CP;
}

const char* gateName(GateKind k) {
  switch (k) {
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::RZZ: return "rzz";
    case GateKind::H: return "h";
    case GateKind::CX: return "cx";
    case GateKind::CP: return "cp";
    case GateKind::SWAP: return "swap";
  }
  return "?";
}

void validateCircuit(const Circuit& c) {
  if (c.qubitCount < 0)
    throw std::invalid_argument("Circuit.qubitCount must be non-negative");
  int prev = -1;
  for (const Gate& g : c.gates) {
    std::ostringstream at;
    at << "gate " << g.id << " (" << gateName(g.kind) << ")";
    if (g.id <= prev)
      throw std::invalid_argument(at.str() + ": ids must strictly increase");
    prev = g.id;
    if (static_cast<int>(g.qubits.size()) != operandCount(g.kind))
      throw std::invalid_argument(at.str() + ": wrong operand count");
    for (int q : g.qubits)
      if (q < 0 || q >= c.qubitCount)
        throw std::invalid_argument(at.str() + ": qubit index out of range");
    if (g.qubits.size() == 2 && g.qubits[0] == g.qubits[1])
      throw std::invalid_argument(at.str() + ": duplicate operand");
    if (!std::isfinite(g.angle))
      throw std::invalid_argument(at.str() + ": non-finite angle");
  }
}

SwapFreeCircuit eliminateSwaps(const Circuit& c) {
  validateCircuit(c);
  SwapFreeCircuit out;
  out.circuit.qubitCount = c.qubitCount;
  out.wireOf.resize(c.qubitCount);
  std::iota(out.wireOf.begin(), out.wireOf.end(), 0);
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::SWAP) {
      std::swap(out.wireOf[g.qubits[0]], out.wireOf[g.qubits[1]]);
      continue;
    }
    Gate e = g;
    for (int& q : e.qubits) q = out.wireOf[q];
    e.id = static_cast<int>(out.circuit.gates.size());
    out.circuit.gates.push_back(std::move(e));
  }
  return out;
}

Circuit decomposeToNative(const Circuit& c) {
  validateCircuit(c);
  Circuit out;
  out.qubitCount = c.qubitCount;
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
      case GateKind::RZZ: {
        Gate e = g;
        e.id = static_cast<int>(out.gates.size());
        out.gates.push_back(std::move(e));
        break;
      }
      case GateKind::H: emitH(out, g.qubits[0]); break;
      case GateKind::CX: emitCX(out, g.qubits[0], g.qubits[1]); break;
      case GateKind::CP:
        emitCP(out, g.qubits[0], g.qubits[1], g.angle);
        break;
      case GateKind::SWAP:
        throw UnsupportedFeatureError(
            "SWAP gates must be eliminated before native decomposition");
    }
  }
  return out;
}

Circuit peepholeOptimize(const Circuit& c) {
  validateCircuit(c);
  for (const Gate& g : c.gates)
    if (!isNative(g.kind))
      throw UnsupportedFeatureError(
          std::string("peephole optimization expects a native circuit, got ") +
          gateName(g.kind));

  std::vector<Gate> cur = c.gates;
  bool changed = true;
  while (changed) {
    changed = false;

    std::vector<Gate> merged;
    std::vector<int> lastTouch(c.qubitCount, -1);
    for (const Gate& g : cur) {
      int j = -1;
      bool sharedLast = true;
      for (int q : g.qubits) {
        if (lastTouch[q] == -1) {
          sharedLast = false;
          break;
        }
        if (j == -1)
          j = lastTouch[q];
        else if (lastTouch[q] != j)
          sharedLast = false;
      }
      if (sharedLast && j != -1 && merged[j].kind == g.kind &&
          sameOperands(merged[j], g)) {
        merged[j].angle += g.angle;
        changed = true;
        continue;
      }
      for (int q : g.qubits) lastTouch[q] = static_cast<int>(merged.size());
      merged.push_back(g);
    }

    std::vector<Gate> kept;
    for (Gate g : merged) {
      g.angle = normalizeAngle(g.angle);
      if (g.angle < kAngleTolerance || 2 * kPi - g.angle < kAngleTolerance) {
        changed = true;
        continue;
      }
      kept.push_back(std::move(g));
    }
    cur = std::move(kept);
  }

  Circuit out;
  out.qubitCount = c.qubitCount;
  for (Gate& g : cur) {
    g.id = static_cast<int>(out.gates.size());
    out.gates.push_back(std::move(g));
  }
  return out;
}

SwapFreeCircuit compileToNative(const Circuit& c) {
  SwapFreeCircuit sf = eliminateSwaps(c);
  sf.circuit = peepholeOptimize(decomposeToNative(sf.circuit));
  return sf;
}

Circuit builtinCircuit(const std::string& family, int qubits) {
  if (qubits < 1)
    throw std::invalid_argument("builtin circuit needs at least one qubit");
  Circuit c;
  c.qubitCount = qubits;
  if (family == "fra") {
    for (int q = 0; q < qubits; ++q) pushGate(c, GateKind::RX, {q}, kPi);
  } else if (family == "ghz") {
    pushGate(c, GateKind::H, {0}, 0.0);
    for (int q = 1; q < qubits; ++q)
      pushGate(c, GateKind::CX, {q - 1, q}, 0.0);
  } else if (family == "graph") {
    for (int q = 0; q < qubits; ++q) pushGate(c, GateKind::H, {q}, 0.0);
    if (qubits == 2) {
      pushGate(c, GateKind::CP, {0, 1}, kPi);
    } else if (qubits >= 3) {
      for (int q = 0; q < qubits; ++q)
        pushGate(c, GateKind::CP, {q, (q + 1) % qubits}, kPi);
    }
  } else if (family == "qft") {
    for (int j = 0; j < qubits; ++j) {
      pushGate(c, GateKind::H, {j}, 0.0);
      for (int k = j + 1; k < qubits; ++k)
        pushGate(c, GateKind::CP, {k, j}, std::ldexp(kPi, j - k));
    }
    for (int j = 0; j < qubits / 2; ++j)
      pushGate(c, GateKind::SWAP, {j, qubits - 1 - j}, 0.0);
  } else {
    throw std::invalid_argument("unknown builtin circuit family: " + family);
  }
  return c;
}

}  // namespace qccd
