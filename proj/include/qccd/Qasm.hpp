#pragma once

#include <stdexcept>
#include <string>

#include "qccd/Circuit.hpp"

namespace qccd {

class QasmError : public std::runtime_error {
public:
  QasmError(int line, int col, const std::string& what);
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int col() const { return col_; }

private:
  int line_;
  int col_;
};

/// Parses the supported OpenQASM 2 subset: optional OPENQASM/include
/// prologue, exactly one qreg, and the gates rx, ry, rz, rzz, h, cx, cp,
/// swap. Angle expressions allow pi, numeric literals, parentheses, unary
/// sign, and + - * /. Syntax problems raise QasmError with position;
/// statements outside the subset raise UnsupportedFeatureError.
Circuit parseQasm(const std::string& text);

/// Emits the same subset; parseQasm(toQasm(c)) reproduces the circuit.
std::string toQasm(const Circuit& c);

}  // namespace qccd
