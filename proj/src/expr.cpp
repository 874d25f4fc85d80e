#include "ppc/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace ppc {

struct Expr::Node {
  Op op = Op::Const;
  double value = 0.0;
  int index = 0;  // variable index, or exponent for Pow
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

Expr::Expr() : Expr(std::make_shared<const Node>()) {}

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) { compile(); }

Expr Expr::make(Op op, double value, int index, const Expr* lhs, const Expr* rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->index = index;
  if (lhs) n->lhs = lhs->root_;
  if (rhs) n->rhs = rhs->root_;
  return Expr(std::move(n));
}

Expr Expr::constant(double value) { return make(Op::Const, value, 0, nullptr, nullptr); }

Expr Expr::variable(int index) {
  if (index < 1) throw InvalidParams("state variable index must be >= 1");
  return make(Op::Var, 0.0, index, nullptr, nullptr);
}

Expr Expr::time() { return make(Op::Time, 0.0, 0, nullptr, nullptr); }

namespace {

bool is_const(const Expr::Op op, double value, double v) { return op == Expr::Op::Const && value == v; }

}  // namespace

// Builders fold trivial constants so symbolic derivatives stay small.
Expr operator+(const Expr& a, const Expr& b) {
  const auto& l = *a.root_;
  const auto& r = *b.root_;
  if (is_const(l.op, l.value, 0.0)) return b;
  if (is_const(r.op, r.value, 0.0)) return a;
  if (l.op == Expr::Op::Const && r.op == Expr::Op::Const) return Expr::constant(l.value + r.value);
  return Expr::make(Expr::Op::Add, 0.0, 0, &a, &b);
}

Expr operator-(const Expr& a, const Expr& b) {
  const auto& l = *a.root_;
  const auto& r = *b.root_;
  if (is_const(r.op, r.value, 0.0)) return a;
  if (is_const(l.op, l.value, 0.0)) return -b;
  if (l.op == Expr::Op::Const && r.op == Expr::Op::Const) return Expr::constant(l.value - r.value);
  return Expr::make(Expr::Op::Sub, 0.0, 0, &a, &b);
}

Expr operator*(const Expr& a, const Expr& b) {
  const auto& l = *a.root_;
  const auto& r = *b.root_;
  if (is_const(l.op, l.value, 0.0) || is_const(r.op, r.value, 0.0)) return Expr::constant(0.0);
  if (is_const(l.op, l.value, 1.0)) return b;
  if (is_const(r.op, r.value, 1.0)) return a;
  if (l.op == Expr::Op::Const && r.op == Expr::Op::Const) return Expr::constant(l.value * r.value);
  return Expr::make(Expr::Op::Mul, 0.0, 0, &a, &b);
}

Expr operator/(const Expr& a, const Expr& b) {
  const auto& l = *a.root_;
  const auto& r = *b.root_;
  if (is_const(l.op, l.value, 0.0)) return Expr::constant(0.0);
  if (is_const(r.op, r.value, 1.0)) return a;
  return Expr::make(Expr::Op::Div, 0.0, 0, &a, &b);
}

Expr operator-(const Expr& a) {
  if (a.root_->op == Expr::Op::Const) return Expr::constant(-a.root_->value);
  if (a.root_->op == Expr::Op::Neg) return Expr(a.root_->lhs);
  return Expr::make(Expr::Op::Neg, 0.0, 0, &a, nullptr);
}

Expr sin(const Expr& a) { return Expr::make(Expr::Op::Sin, 0.0, 0, &a, nullptr); }
Expr cos(const Expr& a) { return Expr::make(Expr::Op::Cos, 0.0, 0, &a, nullptr); }
Expr exp(const Expr& a) { return Expr::make(Expr::Op::Exp, 0.0, 0, &a, nullptr); }
Expr log(const Expr& a) { return Expr::make(Expr::Op::Log, 0.0, 0, &a, nullptr); }

Expr pow(const Expr& a, int exponent) {
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return a;
  return Expr::make(Expr::Op::Pow, 0.0, exponent, &a, nullptr);
}

Expr Expr::derivative(int index) const {
  const Node& n = *root_;
  auto sub = [](const std::shared_ptr<const Node>& p) { return Expr(p); };
  switch (n.op) {
    case Op::Const:
    case Op::Time:
      return constant(0.0);
    case Op::Var:
      return constant(n.index == index ? 1.0 : 0.0);
    case Op::Add:
      return sub(n.lhs).derivative(index) + sub(n.rhs).derivative(index);
    case Op::Sub:
      return sub(n.lhs).derivative(index) - sub(n.rhs).derivative(index);
    case Op::Mul: {
      Expr a = sub(n.lhs), b = sub(n.rhs);
      return a.derivative(index) * b + a * b.derivative(index);
    }
    case Op::Div: {
      Expr a = sub(n.lhs), b = sub(n.rhs);
      return (a.derivative(index) * b - a * b.derivative(index)) / pow(b, 2);
    }
    case Op::Neg:
      return -sub(n.lhs).derivative(index);
    case Op::Sin: {
      Expr a = sub(n.lhs);
      return cos(a) * a.derivative(index);
    }
    case Op::Cos: {
      Expr a = sub(n.lhs);
      return -(sin(a) * a.derivative(index));
    }
    case Op::Exp: {
      Expr a = sub(n.lhs);
      return *this * a.derivative(index);
    }
    case Op::Log: {
      Expr a = sub(n.lhs);
      return a.derivative(index) / a;
    }
    case Op::Pow: {
      Expr a = sub(n.lhs);
      return constant(n.index) * pow(a, n.index - 1) * a.derivative(index);
    }
  }
  return constant(0.0);
}

namespace {

// Shortest form that parses back to the same double.
std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void print(const Expr::Node& n, std::ostringstream& os) {
  using Op = Expr::Op;
  switch (n.op) {
    case Op::Const:
      if (n.value < 0) {
        os << '(' << format_number(n.value) << ')';
      } else {
        os << format_number(n.value);
      }
      return;
    case Op::Var:
      os << 'x' << n.index;
      return;
    case Op::Time:
      os << 't';
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : '/';
      os << '(';
      print(*n.lhs, os);
      os << ' ' << sym << ' ';
      print(*n.rhs, os);
      os << ')';
      return;
    }
    case Op::Neg:
      os << "(-";
      print(*n.lhs, os);
      os << ')';
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log:
      os << (n.op == Op::Sin ? "sin(" : n.op == Op::Cos ? "cos(" : n.op == Op::Exp ? "exp(" : "log(");
      print(*n.lhs, os);
      os << ')';
      return;
    case Op::Pow:
      os << '(';
      print(*n.lhs, os);
      os << ")^" << n.index;
      return;
  }
}

}  // namespace

std::string Expr::to_string() const {
  std::ostringstream os;
  print(*root_, os);
  return os.str();
}

void Expr::compile() {
  program_.clear();
  max_var_ = 0;
  uses_time_ = false;
  int depth = 0;
  int max_depth = 0;
  // Post-order walk: operands are pushed before their operator.
  auto emit = [&](auto&& self, const Node& n) -> void {
    if (n.lhs) self(self, *n.lhs);
    if (n.rhs) self(self, *n.rhs);
    program_.push_back({n.op, n.value, n.index});
    switch (n.op) {
      case Op::Const:
      case Op::Time:
      case Op::Var:
        ++depth;
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
        --depth;
        break;
      default:
        break;
    }
    max_depth = std::max(max_depth, depth);
    if (n.op == Op::Var) max_var_ = std::max(max_var_, n.index);
    if (n.op == Op::Time) uses_time_ = true;
  };
  emit(emit, *root_);
  if (max_depth > kMaxStack) throw InvalidParams("expression too deeply nested");
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression '" << text_ << "': " << what << " at column " << pos_ + 1;
    throw ParseError(os.str());
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        lhs = lhs / unary();
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      skip_ws();
      bool negative = accept('-');
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      int e = std::atoi(std::string(text_.substr(start, pos_ - start)).c_str());
      return pow(base, negative ? -e : e);
    }
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view word = text_.substr(start, pos_ - start);
      if (word == "x") {
        std::size_t dstart = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (dstart == pos_) fail("expected state index after 'x'");
        int idx = std::atoi(std::string(text_.substr(dstart, pos_ - dstart)).c_str());
        if (idx < 1) fail("state index must be >= 1");
        return Expr::variable(idx);
      }
      if (word == "t") return Expr::time();
      if (word == "sin" || word == "cos" || word == "exp" || word == "log") {
        expect('(');
        Expr arg = expr();
        expect(')');
        if (word == "sin") return sin(arg);
        if (word == "cos") return cos(arg);
        if (word == "exp") return exp(arg);
        return log(arg);
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    std::string buf(text_.substr(pos_));
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - buf.c_str());
    return Expr::constant(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(std::string_view text) { return Parser(text).parse(); }

}  // namespace ppc
