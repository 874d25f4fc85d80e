#pragma once

// Small expression language for regressors φ_k(x) and input gains g(x, t).
//
// Grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' integer)?
//   primary := number | 'x' index | 't' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | log
//
// Variables are 1-based state components x1..xn; `t` is time. Expressions are
// immutable once built and can be evaluated on any scalar type supporting the
// usual arithmetic plus sin/cos/exp/log (double, Dual<double>, ...).

#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppc/dual.hpp"
#include "ppc/errors.hpp"

namespace ppc {

class Expr {
 public:
  enum class Op { Const, Var, Time, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp, Log, Pow };

  /// Upper bound on evaluation stack depth; deeper expressions are rejected.
  static constexpr int kMaxStack = 64;

  Expr();  // constant zero

  static Expr constant(double value);
  static Expr variable(int index);
  static Expr time();
  static Expr parse(std::string_view text);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);
  friend Expr pow(const Expr& a, int exponent);

  /// Symbolic partial derivative with respect to x_index (1-based).
  Expr derivative(int index) const;

  std::string to_string() const;

  /// Highest state index referenced (0 if none).
  int max_variable() const { return max_var_; }
  bool uses_time() const { return uses_time_; }

  /// Evaluate at state `x` (x[0] is x1) and time `t`.
  template <typename T>
  T eval(std::span<const T> x, const T& t) const;

  double operator()(std::span<const double> x, double t = 0.0) const { return eval<double>(x, t); }

  struct Node;  // opaque tree node

 private:
  struct Instr {
    Op op;
    double value;
    int index;
  };

  explicit Expr(std::shared_ptr<const Node> root);
  static Expr make(Op op, double value, int index, const Expr* lhs, const Expr* rhs);
  void compile();

  std::shared_ptr<const Node> root_;
  std::vector<Instr> program_;
  int max_var_ = 0;
  bool uses_time_ = false;
};

template <typename T>
T Expr::eval(std::span<const T> x, const T& t) const {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  std::array<T, kMaxStack> stack{};
  int top = 0;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::Const:
        stack[top++] = T(in.value);
        break;
      case Op::Var:
        stack[top++] = x[static_cast<std::size_t>(in.index - 1)];
        break;
      case Op::Time:
        stack[top++] = t;
        break;
      case Op::Add:
        --top;
        stack[top - 1] = stack[top - 1] + stack[top];
        break;
      case Op::Sub:
        --top;
        stack[top - 1] = stack[top - 1] - stack[top];
        break;
      case Op::Mul:
        --top;
        stack[top - 1] = stack[top - 1] * stack[top];
        break;
      case Op::Div:
        --top;
        stack[top - 1] = stack[top - 1] / stack[top];
        break;
      case Op::Neg:
        stack[top - 1] = -stack[top - 1];
        break;
      case Op::Sin:
        stack[top - 1] = sin(stack[top - 1]);
        break;
      case Op::Cos:
        stack[top - 1] = cos(stack[top - 1]);
        break;
      case Op::Exp:
        stack[top - 1] = exp(stack[top - 1]);
        break;
      case Op::Log:
        stack[top - 1] = log(stack[top - 1]);
        break;
      case Op::Pow:
        stack[top - 1] = ipow(stack[top - 1], in.index);
        break;
    }
  }
  return stack[0];
}

}  // namespace ppc
