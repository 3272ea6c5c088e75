#include "qccd/Qasm.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qccd {
namespace {

enum class Tok { Ident, Number, Str, Punct, Bad, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double value = 0.0;
  int line = 1;
  int col = 1;
};

bool identStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool identBody(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (identStart(c)) {
      std::size_t j = i;
      while (j < src.size() && identBody(src[j])) ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (digit(c)) {
      std::size_t j = i;
      while (j < src.size() && digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && digit(src[k])) {
          while (k < src.size() && digit(src[k])) ++k;
          j = k;
        }
      }
      t.kind = Tok::Number;
      t.text = src.substr(i, j - i);
      t.value = std::stod(t.text);
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"')
        throw QasmError(line, col, "unterminated string literal");
      t.kind = Tok::Str;
      t.text = src.substr(i + 1, j - i - 1);
      advance(j - i + 1);
    } else if (std::string(";,()[]+-*/").find(c) != std::string::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      // Recorded, not thrown: the parser may reject the statement as
      // unsupported before ever reaching this character.
      t.kind = Tok::Bad;
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

std::optional<GateKind> mnemonicKind(const std::string& w) {
  if (w == "rx") return GateKind::RX;
  if (w == "ry") return GateKind::RY;
  if (w == "rz") return GateKind::RZ;
  if (w == "rzz") return GateKind::RZZ;
  if (w == "h") return GateKind::H;
  if (w == "cx") return GateKind::CX;
  if (w == "cp") return GateKind::CP;
  if (w == "swap") return GateKind::SWAP;
  return std::nullopt;
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Circuit run() {
    bool first = true;
    while (peek().kind != Tok::End) {
      const Token t = peek();
      if (t.kind != Tok::Ident)
        throw QasmError(t.line, t.col, "expected a statement");
      if (t.text == "OPENQASM") {
        if (!first)
          throw QasmError(t.line, t.col,
                          "OPENQASM header must be the first statement");
        take();
        header();
      } else if (t.text == "include") {
        take();
        const Token f = peek();
        if (f.kind != Tok::Str)
          throw QasmError(f.line, f.col, "expected an include file name");
        take();
        expectPunct(';');
      } else if (t.text == "qreg") {
        take();
        qregDecl(t);
      } else if (auto k = mnemonicKind(t.text)) {
        take();
        gateCall(t, *k);
      } else {
        throw UnsupportedFeatureError("unsupported QASM statement '" + t.text +
                                      "' at line " + std::to_string(t.line));
      }
      first = false;
    }
    Circuit c;
    c.qubitCount = std::max(qubitCount_, 0);
    c.gates = std::move(gates_);
    validateCircuit(c);
    return c;
  }

private:
  const Token& peek() const {
    const Token& t = toks_[pos_];
    if (t.kind == Tok::Bad)
      throw QasmError(t.line, t.col,
                      "unexpected character '" + t.text + "'");
    return t;
  }

  Token take() {
    const Token t = toks_[pos_];
    if (t.kind != Tok::End) ++pos_;
    return t;
  }

  bool atPunct(char c) const {
    return peek().kind == Tok::Punct && peek().text[0] == c;
  }

  void expectPunct(char c) {
    if (!atPunct(c)) {
      const Token& t = peek();
      throw QasmError(t.line, t.col, std::string("expected '") + c + "'");
    }
    take();
  }

  int expectInt(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Number)
      throw QasmError(t.line, t.col, std::string("expected ") + what);
    if (t.value != std::floor(t.value) || t.value < 0 || t.value > 1e9)
      throw QasmError(t.line, t.col,
                      std::string(what) + " must be a nonnegative integer");
    const int v = static_cast<int>(t.value);
    take();
    return v;
  }

  void header() {
    const Token v = peek();
    if (v.kind != Tok::Number)
      throw QasmError(v.line, v.col, "expected a version number");
    take();
    if (v.value != 2.0)
      throw UnsupportedFeatureError("unsupported OPENQASM version " + v.text);
    expectPunct(';');
  }

  void qregDecl(const Token& at) {
    if (qubitCount_ >= 0)
      throw UnsupportedFeatureError(
          "multiple quantum registers are not supported (line " +
          std::to_string(at.line) + ")");
    const Token name = peek();
    if (name.kind != Tok::Ident)
      throw QasmError(name.line, name.col, "expected a register name");
    take();
    regName_ = name.text;
    expectPunct('[');
    const Token sz = peek();
    const int n = expectInt("register size");
    if (n < 1)
      throw QasmError(sz.line, sz.col, "register size must be at least 1");
    expectPunct(']');
    expectPunct(';');
    qubitCount_ = n;
  }

  void gateCall(const Token& at, GateKind kind) {
    double angle = 0.0;
    if (isParameterized(kind)) {
      if (!atPunct('('))
        throw QasmError(peek().line, peek().col,
                        "gate '" + at.text + "' expects a parameter list");
      take();
      angle = expr();
      expectPunct(')');
    } else if (atPunct('(')) {
      throw QasmError(peek().line, peek().col,
                      "gate '" + at.text + "' takes no parameter list");
    }
    std::vector<int> qs;
    qs.push_back(operand());
    while (atPunct(',')) {
      take();
      qs.push_back(operand());
    }
    expectPunct(';');
    if (static_cast<int>(qs.size()) != operandCount(kind))
      throw QasmError(at.line, at.col,
                      "gate '" + at.text + "' expects " +
                          std::to_string(operandCount(kind)) +
                          " operands, got " + std::to_string(qs.size()));
    if (qs.size() == 2 && qs[0] == qs[1])
      throw QasmError(at.line, at.col, "gate operands must be distinct");
    Gate g;
    g.id = static_cast<int>(gates_.size());
    g.kind = kind;
    g.qubits = std::move(qs);
    g.angle = angle;
    gates_.push_back(std::move(g));
  }

  int operand() {
    const Token t = peek();
    if (t.kind != Tok::Ident)
      throw QasmError(t.line, t.col, "expected a qubit operand");
    if (qubitCount_ < 0)
      throw QasmError(t.line, t.col, "gate call before qreg declaration");
    take();
    if (t.text != regName_)
      throw QasmError(t.line, t.col, "unknown register '" + t.text + "'");
    expectPunct('[');
    const Token it = peek();
    const int idx = expectInt("qubit index");
    if (idx >= qubitCount_)
      throw QasmError(it.line, it.col,
                      "qubit index " + std::to_string(idx) +
                          " out of range for register of size " +
                          std::to_string(qubitCount_));
    expectPunct(']');
    return idx;
  }

  double expr() {
    double v = term();
    while (atPunct('+') || atPunct('-')) {
      const char op = take().text[0];
      const double r = term();
      v = (op == '+') ? v + r : v - r;
    }
    return v;
  }

  double term() {
    double v = factor();
    while (atPunct('*') || atPunct('/')) {
      const char op = take().text[0];
      const double r = factor();
      v = (op == '*') ? v * r : v / r;
    }
    return v;
  }

  double factor() {
    double sign = 1.0;
    while (atPunct('+') || atPunct('-')) {
      if (take().text[0] == '-') sign = -sign;
    }
    return sign * primary();
  }

  double primary() {
    const Token t = peek();
    if (t.kind == Tok::Number) {
      take();
      return t.value;
    }
    if (t.kind == Tok::Ident && t.text == "pi") {
      take();
      return std::numbers::pi;
    }
    if (atPunct('(')) {
      take();
      const double v = expr();
      expectPunct(')');
      return v;
    }
    if (t.kind == Tok::Ident)
      throw QasmError(t.line, t.col,
                      "unknown symbol '" + t.text + "' in expression");
    throw QasmError(t.line, t.col, "expected an expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int qubitCount_ = -1;
  std::string regName_;
  std::vector<Gate> gates_;
};

std::string mnemonic(GateKind k) {
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

std::string formatAngle(double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", a);
  return buf;
}

}  // namespace

QasmError::QasmError(int line, int col, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", col " +
                         std::to_string(col) + ": " + what),
      line_(line),
      col_(col) {}

Circuit parseQasm(const std::string& text) {
  return Parser(lex(text)).run();
}

std::string toQasm(const Circuit& c) {
  validateCircuit(c);
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  if (c.qubitCount > 0) out << "qreg q[" << c.qubitCount << "];\n";
  for (const Gate& g : c.gates) {
    out << mnemonic(g.kind);
    if (isParameterized(g.kind)) out << '(' << formatAngle(g.angle) << ')';
    out << ' ';
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      if (i) out << ',';
      out << "q[" << g.qubits[i] << ']';
    }
    out << ";\n";
  }
  return out.str();
}

}  // namespace qccd
