#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qccd {

/// Gate kinds. The first four are the native set executed by the hardware;
/// the rest appear only in pre-translation circuits.
enum class GateKind : std::uint8_t { RX, RY, RZ, RZZ, H, CX, CP, SWAP };

[[nodiscard]] bool isNative(GateKind k);
[[nodiscard]] int operandCount(GateKind k);
[[nodiscard]] bool isParameterized(GateKind k);
[[nodiscard]] const char* gateName(GateKind k);

struct Gate {
  int id = 0;
  GateKind kind = GateKind::RX;
  std::vector<int> qubits;  ///< 1 or 2 distinct operands
  double angle = 0.0;       ///< radians; ignored by H, CX, SWAP
};

struct Circuit {
  int qubitCount = 0;
  std::vector<Gate> gates;  ///< program order, ids strictly increasing
};

/// Throws std::invalid_argument naming the offending gate when a structural
/// invariant fails (operand count, qubit range, duplicate operands,
/// non-finite angle, non-increasing ids).
void validateCircuit(const Circuit& c);

class UnsupportedFeatureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SwapFreeCircuit {
  Circuit circuit;
  /// Wire permutation left behind by the dropped SWAPs: qubit label q's
  /// output ends up on wire wireOf[q]. The original unitary equals P * U
  /// where U is the returned circuit's unitary and P permutes basis state x
  /// to y with y[q] = x[wireOf[q]].
  std::vector<int> wireOf;
};

/// Removes every SWAP by relabeling the operands of all later gates.
SwapFreeCircuit eliminateSwaps(const Circuit& c);

/// Rewrites H, CX, and CP into the native set with fixed identities, each
/// unitary-equivalent to its source gate up to global phase. The input must
/// be SWAP-free.
Circuit decomposeToNative(const Circuit& c);

/// Merges timeline-adjacent same-kind rotations on identical operand sets by
/// angle addition, normalizes angles into [0, 2pi), and drops rotations whose
/// angle is 0 (mod 2pi) within kAngleTolerance; iterated to fixpoint.
Circuit peepholeOptimize(const Circuit& c);

/// Angle comparison tolerance used by the optimizer's identity removal.
inline constexpr double kAngleTolerance = 1e-9;

/// eliminateSwaps, then decomposeToNative, then peepholeOptimize.
SwapFreeCircuit compileToNative(const Circuit& c);

/// Builtin benchmark families in their pre-translation forms:
/// "fra" (one RX(pi) per qubit), "ghz" (H + CX ladder), "graph" (H on all +
/// CP(pi) ring), "qft" (textbook QFT with trailing SWAPs).
Circuit builtinCircuit(const std::string& family, int qubits);

}  // namespace qccd
