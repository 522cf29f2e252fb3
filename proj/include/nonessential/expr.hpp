#pragma once

/**
 * @file
 * @brief Scalar expression language for dynamics, constraints and cost integrands.
 *
 * Grammar (EBNF), lowest precedence first:
 *
 *     expr    = term { ("+" | "-") term } ;
 *     term    = unary { ("*" | "/") unary } ;
 *     unary   = "-" unary | power ;
 *     power   = primary [ "^" unary ] ;             (* right-associative *)
 *     primary = number | variable | call | "(" expr ")" ;
 *     call    = function "(" expr { "," expr } ")" ;
 *     variable = "t" | "x" index | "u" index | "y" index ;
 *     function = "abs" | "sgn" | "sin" | "cos" | "exp" | "sqrt" | "min" | "max" ;
 *     number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
 *
 * Indices are 1-based. `y1..yN` name criterion values and only appear in
 * composition tags. `min` and `max` take two arguments, every other function one.
 */

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nonessential {

enum class VarKind { Time, State, Control, Criterion };

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

enum class Function { Abs, Sgn, Sin, Cos, Exp, Sqrt, Min, Max };

/// Values bound to the variables of an expression during evaluation.
struct EvalContext {
  double t = 0.0;
  std::span<const double> x;
  std::span<const double> u;
  std::span<const double> y;
};

class Expr {
 public:
  enum class Kind { Number, Variable, Negate, Binary, Call };

  struct Node {
    Kind kind = Kind::Number;
    double value = 0.0;
    VarKind var = VarKind::Time;
    int index = 0;  // 0-based
    BinaryOp op = BinaryOp::Add;
    Function fn = Function::Abs;
    std::vector<std::shared_ptr<const Node>> args;
  };

  /// The constant 0.
  Expr();

  static Expr parse(std::string_view source);

  static Expr number(double value);
  /// `index` is 1-based; ignored for VarKind::Time.
  static Expr variable(VarKind kind, int index = 0);
  static Expr negate(const Expr& operand);
  static Expr binary(BinaryOp op, const Expr& lhs, const Expr& rhs);
  static Expr call(Function fn, std::vector<Expr> args);

  double eval(const EvalContext& ctx) const;
  double eval(double t, std::span<const double> x, std::span<const double> u) const {
    return eval(EvalContext{t, x, u, {}});
  }

  /// Minimal-parenthesis rendering that parses back to the same tree.
  std::string to_string() const;

  const Node& root() const noexcept { return *root_; }

  /// Highest 1-based index of `kind` referenced, 0 when unreferenced.
  int max_index(VarKind kind) const;
  bool references(VarKind kind) const;
  /// `index` is 1-based.
  bool references(VarKind kind, int index) const;
  /// True when some abs(...) argument references control `index` (1-based).
  bool has_abs_of_control(int index) const;

  /// Copy with every abs(z) replaced by sqrt(z^2 + delta^2).
  Expr with_smoothed_abs(double delta) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Program;

  explicit Expr(std::shared_ptr<const Node> root);

  std::shared_ptr<const Node> root_;
  std::shared_ptr<const Program> program_;
};

std::string_view function_name(Function fn);

}  // namespace nonessential
