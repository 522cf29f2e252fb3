#include "nonessential/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <functional>

#include "nonessential/error.hpp"

namespace nonessential {

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct FunctionInfo {
  std::string_view name;
  Function fn;
  int arity;
};

constexpr std::array<FunctionInfo, 8> kFunctions{{
    {"abs", Function::Abs, 1},
    {"sgn", Function::Sgn, 1},
    {"sin", Function::Sin, 1},
    {"cos", Function::Cos, 1},
    {"exp", Function::Exp, 1},
    {"sqrt", Function::Sqrt, 1},
    {"min", Function::Min, 2},
    {"max", Function::Max, 2},
}};

int arity(Function fn) {
  for (const auto& info : kFunctions)
    if (info.fn == fn) return info.arity;
  return 1;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { End, Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma };

struct Token {
  Tok kind = Tok::End;
  std::size_t pos = 0;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  void advance() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r'))
      ++pos_;
    current_ = Token{};
    current_.pos = pos_;
    if (pos_ >= src_.size()) return;

    const char c = src_[pos_];
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      lex_number();
      return;
    }
    if (is_alpha(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && (is_alpha(src_[end]) || is_digit(src_[end]))) ++end;
      current_.kind = Tok::Ident;
      current_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    switch (c) {
      case '+': current_.kind = Tok::Plus; break;
      case '-': current_.kind = Tok::Minus; break;
      case '*': current_.kind = Tok::Star; break;
      case '/': current_.kind = Tok::Slash; break;
      case '^': current_.kind = Tok::Caret; break;
      case '(': current_.kind = Tok::LParen; break;
      case ')': current_.kind = Tok::RParen; break;
      case ',': current_.kind = Tok::Comma; break;
      default: throw ParseError("syntax error: unexpected character '" + std::string(1, c) + "'", pos_);
    }
    current_.text = src_.substr(pos_, 1);
    ++pos_;
  }

  void lex_number() {
    std::size_t end = pos_;
    while (end < src_.size() && is_digit(src_[end])) ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && is_digit(src_[end])) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp = end + 1;
      if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
      if (exp < src_.size() && is_digit(src_[exp])) {
        while (exp < src_.size() && is_digit(src_[exp])) ++exp;
        end = exp;
      }
    }
    double value = 0.0;
    const char* first = src_.data() + pos_;
    // from_chars rejects a leading '.', so parse ".5" as "0.5".
    std::string buffer;
    if (*first == '.') {
      buffer = "0" + std::string(src_.substr(pos_, end - pos_));
      auto res = std::from_chars(buffer.data(), buffer.data() + buffer.size(), value);
      if (res.ec != std::errc{}) throw ParseError("syntax error: bad number", pos_);
    } else {
      auto res = std::from_chars(first, src_.data() + end, value);
      if (res.ec != std::errc{}) throw ParseError("syntax error: bad number", pos_);
    }
    current_.kind = Tok::Number;
    current_.number = value;
    current_.text = src_.substr(pos_, end - pos_);
    pos_ = end;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token current_;
};

// ---------------------------------------------------------------------------
// Node construction

NodePtr make_number(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::Number;
  n->value = v;
  return n;
}

NodePtr make_variable(VarKind kind, int index0) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::Variable;
  n->var = kind;
  n->index = kind == VarKind::Time ? 0 : index0;
  return n;
}

NodePtr make_negate(NodePtr operand) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::Negate;
  n->args.push_back(std::move(operand));
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::Binary;
  n->op = op;
  n->args.push_back(std::move(lhs));
  n->args.push_back(std::move(rhs));
  return n;
}

NodePtr make_call(Function fn, std::vector<NodePtr> args) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::Call;
  n->fn = fn;
  n->args = std::move(args);
  return n;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  NodePtr parse() {
    NodePtr e = expr();
    if (lex_.peek().kind != Tok::End) fail_unexpected(lex_.peek());
    return e;
  }

 private:
  [[noreturn]] static void fail_unexpected(const Token& t) {
    if (t.kind == Tok::End) throw ParseError("syntax error: unexpected end of input", t.pos);
    throw ParseError("syntax error: unexpected '" + std::string(t.text) + "'", t.pos);
  }

  void expect(Tok kind) {
    if (lex_.peek().kind != kind) fail_unexpected(lex_.peek());
    lex_.take();
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      const Tok k = lex_.peek().kind;
      if (k != Tok::Plus && k != Tok::Minus) return lhs;
      lex_.take();
      lhs = make_binary(k == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub, lhs, term());
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      const Tok k = lex_.peek().kind;
      if (k != Tok::Star && k != Tok::Slash) return lhs;
      lex_.take();
      lhs = make_binary(k == Tok::Star ? BinaryOp::Mul : BinaryOp::Div, lhs, unary());
    }
  }

  NodePtr unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      return make_negate(unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (lex_.peek().kind != Tok::Caret) return base;
    lex_.take();
    return make_binary(BinaryOp::Pow, base, unary());
  }

  NodePtr primary() {
    const Token t = lex_.peek();
    switch (t.kind) {
      case Tok::Number:
        lex_.take();
        return make_number(t.number);
      case Tok::LParen: {
        lex_.take();
        NodePtr e = expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Ident:
        lex_.take();
        return identifier(t);
      default:
        fail_unexpected(t);
    }
  }

  NodePtr identifier(const Token& t) {
    for (const auto& info : kFunctions) {
      if (info.name != t.text) continue;
      if (lex_.peek().kind != Tok::LParen)
        throw ParseError("syntax error: expected '(' after " + std::string(t.text), lex_.peek().pos);
      lex_.take();
      std::vector<NodePtr> args;
      args.push_back(expr());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        args.push_back(expr());
      }
      expect(Tok::RParen);
      if (static_cast<int>(args.size()) != info.arity)
        throw ParseError("arity mismatch: " + std::string(info.name) + " takes " + std::to_string(info.arity) +
                             " argument(s), got " + std::to_string(args.size()),
                         t.pos);
      return make_call(info.fn, std::move(args));
    }
    if (t.text == "t") return make_variable(VarKind::Time, 0);
    if (t.text.size() >= 2) {
      VarKind kind;
      switch (t.text[0]) {
        case 'x': kind = VarKind::State; break;
        case 'u': kind = VarKind::Control; break;
        case 'y': kind = VarKind::Criterion; break;
        default: throw ParseError("unknown identifier '" + std::string(t.text) + "'", t.pos);
      }
      int index = 0;
      const auto digits = t.text.substr(1);
      auto res = std::from_chars(digits.data(), digits.data() + digits.size(), index);
      if (res.ec == std::errc{} && res.ptr == digits.data() + digits.size() && index >= 1 && digits[0] != '0')
        return make_variable(kind, index - 1);
    }
    throw ParseError("unknown identifier '" + std::string(t.text) + "'", t.pos);
  }

  Lexer lex_;
};

// ---------------------------------------------------------------------------
// Printer

int precedence(const Expr::Node& n) {
  switch (n.kind) {
    case Expr::Kind::Binary:
      switch (n.op) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
      }
      return 1;
    case Expr::Kind::Negate: return 3;
    case Expr::Kind::Number: return n.value < 0 || std::signbit(n.value) ? 0 : 5;
    default: return 5;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void print(const Expr::Node& n, std::string& out);

void print_wrapped(const Expr::Node& n, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(n, out);
  if (wrap) out += ')';
}

void print(const Expr::Node& n, std::string& out) {
  switch (n.kind) {
    case Expr::Kind::Number:
      out += format_number(n.value);
      return;
    case Expr::Kind::Variable:
      switch (n.var) {
        case VarKind::Time: out += 't'; return;
        case VarKind::State: out += 'x'; break;
        case VarKind::Control: out += 'u'; break;
        case VarKind::Criterion: out += 'y'; break;
      }
      out += std::to_string(n.index + 1);
      return;
    case Expr::Kind::Negate:
      out += '-';
      print_wrapped(*n.args[0], precedence(*n.args[0]) < 3, out);
      return;
    case Expr::Kind::Call:
      out += function_name(n.fn);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print(*n.args[i], out);
      }
      out += ')';
      return;
    case Expr::Kind::Binary: {
      const int p = precedence(n);
      const auto& lhs = *n.args[0];
      const auto& rhs = *n.args[1];
      if (n.op == BinaryOp::Pow) {
        print_wrapped(lhs, precedence(lhs) <= 4, out);
        out += '^';
        print_wrapped(rhs, precedence(rhs) < 3, out);
        return;
      }
      print_wrapped(lhs, precedence(lhs) < p, out);
      switch (n.op) {
        case BinaryOp::Add: out += " + "; break;
        case BinaryOp::Sub: out += " - "; break;
        case BinaryOp::Mul: out += '*'; break;
        case BinaryOp::Div: out += '/'; break;
        case BinaryOp::Pow: break;
      }
      print_wrapped(rhs, precedence(rhs) <= p, out);
      return;
    }
  }
}

bool equal_nodes(const Expr::Node& a, const Expr::Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Expr::Kind::Number:
      if (a.value != b.value) return false;
      break;
    case Expr::Kind::Variable:
      if (a.var != b.var || a.index != b.index) return false;
      break;
    case Expr::Kind::Binary:
      if (a.op != b.op) return false;
      break;
    case Expr::Kind::Call:
      if (a.fn != b.fn) return false;
      break;
    case Expr::Kind::Negate: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal_nodes(*a.args[i], *b.args[i])) return false;
  return true;
}

bool any_node(const Expr::Node& n, const std::function<bool(const Expr::Node&)>& pred) {
  if (pred(n)) return true;
  for (const auto& a : n.args)
    if (any_node(*a, pred)) return true;
  return false;
}

NodePtr smooth_abs(const NodePtr& n, double delta) {
  std::vector<NodePtr> args;
  args.reserve(n->args.size());
  for (const auto& a : n->args) args.push_back(smooth_abs(a, delta));
  if (n->kind == Expr::Kind::Call && n->fn == Function::Abs) {
    auto sq = make_binary(BinaryOp::Pow, args[0], make_number(2.0));
    auto d2 = make_number(delta * delta);
    return make_call(Function::Sqrt, {make_binary(BinaryOp::Add, sq, d2)});
  }
  if (args.empty()) return n;
  auto copy = std::make_shared<Expr::Node>(*n);
  copy->args = std::move(args);
  return copy;
}

}  // namespace

// ---------------------------------------------------------------------------
// Compiled postfix program

enum class OpCode : unsigned char {
  Const, Time, State, Control, Criterion, Neg, Add, Sub, Mul, Div, Pow,
  Abs, Sgn, Sin, Cos, Exp, Sqrt, Min, Max
};

struct Instr {
  OpCode op;
  int index;
  double value;
};

struct Expr::Program {
  std::vector<Instr> code;
  std::size_t max_depth = 0;

  explicit Program(const Node& root) {
    std::size_t depth = 0;
    emit(root, depth);
  }

  void push(Instr i, std::size_t& depth, int pops) {
    code.push_back(i);
    depth = depth - static_cast<std::size_t>(pops) + 1;
    max_depth = std::max(max_depth, depth);
  }

  void emit(const Node& n, std::size_t& depth) {
    switch (n.kind) {
      case Kind::Number: push({OpCode::Const, 0, n.value}, depth, 0); return;
      case Kind::Variable: {
        OpCode op = OpCode::Time;
        if (n.var == VarKind::State) op = OpCode::State;
        if (n.var == VarKind::Control) op = OpCode::Control;
        if (n.var == VarKind::Criterion) op = OpCode::Criterion;
        push({op, n.index, 0.0}, depth, 0);
        return;
      }
      case Kind::Negate:
        emit(*n.args[0], depth);
        push({OpCode::Neg, 0, 0.0}, depth, 1);
        return;
      case Kind::Binary: {
        emit(*n.args[0], depth);
        emit(*n.args[1], depth);
        static constexpr OpCode ops[] = {OpCode::Add, OpCode::Sub, OpCode::Mul, OpCode::Div, OpCode::Pow};
        push({ops[static_cast<int>(n.op)], 0, 0.0}, depth, 2);
        return;
      }
      case Kind::Call: {
        for (const auto& a : n.args) emit(*a, depth);
        static constexpr OpCode ops[] = {OpCode::Abs, OpCode::Sgn, OpCode::Sin, OpCode::Cos,
                                         OpCode::Exp, OpCode::Sqrt, OpCode::Min, OpCode::Max};
        push({ops[static_cast<int>(n.fn)], 0, 0.0}, depth, static_cast<int>(n.args.size()));
        return;
      }
    }
  }

  double run(const EvalContext& ctx, double* stack) const {
    std::size_t sp = 0;
    auto load = [](std::span<const double> s, int i, const char* what) {
      if (static_cast<std::size_t>(i) >= s.size())
        throw EvalError(std::string("unbound variable ") + what + std::to_string(i + 1));
      return s[static_cast<std::size_t>(i)];
    };
    for (const Instr& in : code) {
      switch (in.op) {
        case OpCode::Const: stack[sp++] = in.value; break;
        case OpCode::Time: stack[sp++] = ctx.t; break;
        case OpCode::State: stack[sp++] = load(ctx.x, in.index, "x"); break;
        case OpCode::Control: stack[sp++] = load(ctx.u, in.index, "u"); break;
        case OpCode::Criterion: stack[sp++] = load(ctx.y, in.index, "y"); break;
        case OpCode::Neg: stack[sp - 1] = -stack[sp - 1]; break;
        case OpCode::Add: --sp; stack[sp - 1] += stack[sp]; break;
        case OpCode::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case OpCode::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case OpCode::Div:
          --sp;
          if (stack[sp] == 0.0) throw EvalError("division by zero");
          stack[sp - 1] /= stack[sp];
          break;
        case OpCode::Pow: {
          --sp;
          const double base = stack[sp - 1];
          const double exponent = stack[sp];
          if (base < 0.0 && exponent != std::floor(exponent))
            throw EvalError("domain error: fractional power of a negative number");
          if (base == 0.0 && exponent < 0.0) throw EvalError("division by zero");
          stack[sp - 1] = exponent == 2.0 ? base * base : std::pow(base, exponent);
          break;
        }
        case OpCode::Abs: stack[sp - 1] = std::fabs(stack[sp - 1]); break;
        case OpCode::Sgn: {
          const double v = stack[sp - 1];
          stack[sp - 1] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
          break;
        }
        case OpCode::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
        case OpCode::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
        case OpCode::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
        case OpCode::Sqrt:
          if (stack[sp - 1] < 0.0) throw EvalError("domain error: sqrt of a negative number");
          stack[sp - 1] = std::sqrt(stack[sp - 1]);
          break;
        case OpCode::Min: --sp; stack[sp - 1] = std::min(stack[sp - 1], stack[sp]); break;
        case OpCode::Max: --sp; stack[sp - 1] = std::max(stack[sp - 1], stack[sp]); break;
      }
    }
    return stack[0];
  }
};

Expr::Expr() : Expr(make_number(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> root)
    : root_(std::move(root)), program_(std::make_shared<const Program>(*root_)) {}

Expr Expr::parse(std::string_view source) { return Expr(Parser(source).parse()); }

Expr Expr::number(double value) { return Expr(make_number(value)); }

Expr Expr::variable(VarKind kind, int index) { return Expr(make_variable(kind, index - 1)); }

Expr Expr::negate(const Expr& operand) { return Expr(make_negate(operand.root_)); }

Expr Expr::binary(BinaryOp op, const Expr& lhs, const Expr& rhs) {
  return Expr(make_binary(op, lhs.root_, rhs.root_));
}

Expr Expr::call(Function fn, std::vector<Expr> args) {
  if (static_cast<int>(args.size()) != arity(fn))
    throw Error("arity mismatch: " + std::string(function_name(fn)));
  std::vector<NodePtr> nodes;
  for (const auto& a : args) nodes.push_back(a.root_);
  return Expr(make_call(fn, std::move(nodes)));
}

double Expr::eval(const EvalContext& ctx) const {
  if (program_->max_depth <= 32) {
    std::array<double, 32> stack;
    return program_->run(ctx, stack.data());
  }
  std::vector<double> stack(program_->max_depth);
  return program_->run(ctx, stack.data());
}

std::string Expr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

int Expr::max_index(VarKind kind) const {
  int best = 0;
  std::function<void(const Node&)> walk = [&](const Node& n) {
    if (n.kind == Kind::Variable && n.var == kind) best = std::max(best, n.index + 1);
    for (const auto& a : n.args) walk(*a);
  };
  walk(*root_);
  return best;
}

bool Expr::references(VarKind kind) const {
  return any_node(*root_, [kind](const Node& n) { return n.kind == Kind::Variable && n.var == kind; });
}

bool Expr::references(VarKind kind, int index) const {
  const int i0 = kind == VarKind::Time ? 0 : index - 1;
  return any_node(*root_, [kind, i0](const Node& n) {
    return n.kind == Kind::Variable && n.var == kind && n.index == i0;
  });
}

bool Expr::has_abs_of_control(int index) const {
  const int i0 = index - 1;
  return any_node(*root_, [i0](const Node& n) {
    if (n.kind != Kind::Call || n.fn != Function::Abs) return false;
    return any_node(*n.args[0], [i0](const Node& m) {
      return m.kind == Kind::Variable && m.var == VarKind::Control && m.index == i0;
    });
  });
}

Expr Expr::with_smoothed_abs(double delta) const { return Expr(smooth_abs(root_, delta)); }

bool operator==(const Expr& a, const Expr& b) { return equal_nodes(*a.root_, *b.root_); }

std::string_view function_name(Function fn) {
  for (const auto& info : kFunctions)
    if (info.fn == fn) return info.name;
  return "?";
}

}  // namespace nonessential
