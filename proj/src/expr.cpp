#include "driftbound/expr.hpp"

#include <array>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "driftbound/error.hpp"

namespace driftbound {

namespace {

enum class Op {
  Number,
  VarX,
  VarT,
  VarS,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Exp,
  Ln,
  LnLn,
  Sin,
  Cos,
  Abs,
};

constexpr std::size_t kMaxStack = 64;

[[noreturn]] void domain_error(const char* what) { throw Error(ErrorCode::EvalDomain, what); }

double checked_ln(double a) {
  if (!(a > 0.0)) domain_error("ln of a non-positive argument");
  return std::log(a);
}

double checked_pow(double base, double exponent) {
  if (base < 0.0 && exponent != std::floor(exponent)) {
    domain_error("non-integer power of a negative base");
  }
  if (base == 0.0 && exponent < 0.0) domain_error("negative power of zero");
  return std::pow(base, exponent);
}

double checked_div(double a, double b) {
  if (b == 0.0) domain_error("division by zero");
  return a / b;
}

double apply_unary(Op op, double a) {
  switch (op) {
    case Op::Neg: return -a;
    case Op::Exp: return std::exp(a);
    case Op::Ln: return checked_ln(a);
    case Op::LnLn: return checked_ln(checked_ln(a));
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Abs: return std::fabs(a);
    default: break;
  }
  domain_error("bad unary operator");
}

double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return checked_div(a, b);
    case Op::Pow: return checked_pow(a, b);
    default: break;
  }
  domain_error("bad binary operator");
}

int arity(Op op) {
  switch (op) {
    case Op::Number:
    case Op::VarX:
    case Op::VarT:
    case Op::VarS: return 0;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: return 2;
    default: return 1;
  }
}

}  // namespace

struct Expr::Node {
  Op op = Op::Number;
  double value = 0.0;  // Number literal or VarX axis
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

struct Expr::Program {
  struct Instr {
    Op op;
    double value;
  };
  std::vector<Instr> code;
  std::size_t depth = 0;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_node(Op op, double value = 0.0, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = value;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

std::size_t emit(const Expr::Node& node, std::vector<std::pair<Op, double>>& out) {
  // Returns the stack depth needed to evaluate this subtree.
  switch (arity(node.op)) {
    case 0:
      out.emplace_back(node.op, node.value);
      return 1;
    case 1: {
      const std::size_t d = emit(*node.lhs, out);
      out.emplace_back(node.op, 0.0);
      return d;
    }
    default: {
      const std::size_t dl = emit(*node.lhs, out);
      const std::size_t dr = emit(*node.rhs, out);
      out.emplace_back(node.op, 0.0);
      return std::max(dl, dr + 1);
    }
  }
}

double eval_tree(const Expr::Node& node, const EvalPoint& p) {
  switch (node.op) {
    case Op::Number: return node.value;
    case Op::VarX: {
      const auto axis = static_cast<std::size_t>(node.value);
      if (axis >= p.x.size()) throw Error(ErrorCode::BadParameter, "spatial variable out of range");
      return p.x[axis];
    }
    case Op::VarT: return p.t;
    case Op::VarS: return p.s;
    default: break;
  }
  if (arity(node.op) == 1) return apply_unary(node.op, eval_tree(*node.lhs, p));
  return apply_binary(node.op, eval_tree(*node.lhs, p), eval_tree(*node.rhs, p));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0.0) return "(" + s + ")";
  return s;
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::LnLn: return "lnln";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Abs: return "abs";
    default: return "?";
  }
}

void print(const Expr::Node& node, std::string& out) {
  switch (node.op) {
    case Op::Number: out += format_number(node.value); return;
    case Op::VarX: out += "x" + std::to_string(static_cast<int>(node.value) + 1); return;
    case Op::VarT: out += "t"; return;
    case Op::VarS: out += "s"; return;
    case Op::Neg:
      out += "(-";
      print(*node.lhs, out);
      out += ")";
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const char* sym = node.op == Op::Add ? " + " : node.op == Op::Sub ? " - "
                        : node.op == Op::Mul ? " * " : " / ";
      out += "(";
      print(*node.lhs, out);
      out += sym;
      print(*node.rhs, out);
      out += ")";
      return;
    }
    case Op::Pow:
      out += "pow(";
      print(*node.lhs, out);
      out += ", ";
      print(*node.rhs, out);
      out += ")";
      return;
    default:
      out += function_name(node.op);
      out += "(";
      print(*node.lhs, out);
      out += ")";
      return;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail({"operator", "end of input"}, "unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& msg) {
    throw ParseError(pos_, std::move(expected), msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail({std::string(1, c)}, std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Op::Add, 0.0, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(Op::Sub, 0.0, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Op::Mul, 0.0, lhs, unary());
      } else if (accept('/')) {
        lhs = make_node(Op::Div, 0.0, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_node(Op::Neg, 0.0, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_node(Op::Pow, 0.0, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail({"number", "name", "("}, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail({"number", "name", "("}, std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail({"number"}, "malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return make_node(Op::Number, value);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id(src_.substr(start, pos_ - start));
    skip_ws();
    const bool call = pos_ < src_.size() && src_[pos_] == '(';
    if (!call) {
      if (id == "t") return make_node(Op::VarT);
      if (id == "s") return make_node(Op::VarS);
      if (id == "pi") return make_node(Op::Number, std::numbers::pi);
      if (id == "e") return make_node(Op::Number, std::numbers::e);
      if (id.size() == 2 && id[0] == 'x' && id[1] >= '1' && id[1] <= '3') {
        return make_node(Op::VarX, static_cast<double>(id[1] - '1'));
      }
      pos_ = start;
      fail({"x1", "x2", "x3", "t", "s", "pi", "e", "function call"},
           "unknown variable '" + id + "'");
    }
    ++pos_;  // '('
    if (id == "pow") {
      NodePtr a = expr();
      expect(',');
      NodePtr b = expr();
      expect(')');
      return make_node(Op::Pow, 0.0, a, b);
    }
    Op op;
    if (id == "exp") op = Op::Exp;
    else if (id == "ln") op = Op::Ln;
    else if (id == "lnln") op = Op::LnLn;
    else if (id == "sin") op = Op::Sin;
    else if (id == "cos") op = Op::Cos;
    else if (id == "abs") op = Op::Abs;
    else {
      pos_ = start;
      fail({"exp", "ln", "lnln", "sin", "cos", "abs", "pow"}, "unknown function '" + id + "'");
    }
    NodePtr a = expr();
    expect(')');
    return make_node(op, 0.0, a);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

void scan(const Expr::Node& node, int& max_axis, bool& uses_t, bool& uses_s) {
  switch (node.op) {
    case Op::VarX: max_axis = std::max(max_axis, static_cast<int>(node.value)); break;
    case Op::VarT: uses_t = true; break;
    case Op::VarS: uses_s = true; break;
    default: break;
  }
  if (node.lhs) scan(*node.lhs, max_axis, uses_t, uses_s);
  if (node.rhs) scan(*node.rhs, max_axis, uses_t, uses_s);
}

}  // namespace

Expr::Expr() : Expr(make_node(Op::Number, 0.0)) {}

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {
  scan(*root_, max_axis_, uses_t_, uses_s_);
  std::vector<std::pair<Op, double>> flat;
  const std::size_t depth = emit(*root_, flat);
  if (depth <= kMaxStack) {
    auto prog = std::make_shared<Program>();
    prog->depth = depth;
    prog->code.reserve(flat.size());
    for (const auto& [op, v] : flat) prog->code.push_back({op, v});
    program_ = std::move(prog);
  }
}

Expr Expr::parse(std::string_view source) { return Expr(Parser(source).parse()); }
Expr Expr::constant(double value) { return Expr(make_node(Op::Number, value)); }
Expr Expr::x(int axis) { return Expr(make_node(Op::VarX, static_cast<double>(axis))); }
Expr Expr::t() { return Expr(make_node(Op::VarT)); }
Expr Expr::s() { return Expr(make_node(Op::VarS)); }

double Expr::eval(const EvalPoint& p) const {
  double result;
  if (!program_) {
    result = eval_tree(*root_, p);
  } else {
    std::array<double, kMaxStack> stack;
    std::size_t top = 0;
    for (const auto& ins : program_->code) {
      switch (ins.op) {
        case Op::Number: stack[top++] = ins.value; break;
        case Op::VarX: {
          const auto axis = static_cast<std::size_t>(ins.value);
          if (axis >= p.x.size()) {
            throw Error(ErrorCode::BadParameter, "spatial variable out of range");
          }
          stack[top++] = p.x[axis];
          break;
        }
        case Op::VarT: stack[top++] = p.t; break;
        case Op::VarS: stack[top++] = p.s; break;
        case Op::Add: --top; stack[top - 1] += stack[top]; break;
        case Op::Sub: --top; stack[top - 1] -= stack[top]; break;
        case Op::Mul: --top; stack[top - 1] *= stack[top]; break;
        case Op::Div:
        case Op::Pow:
          --top;
          stack[top - 1] = apply_binary(ins.op, stack[top - 1], stack[top]);
          break;
        default: stack[top - 1] = apply_unary(ins.op, stack[top - 1]); break;
      }
    }
    result = stack[0];
  }
  if (!std::isfinite(result)) domain_error("non-finite value");
  return result;
}

std::string Expr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(make_node(Op::Add, 0.0, a.root_, b.root_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(make_node(Op::Sub, 0.0, a.root_, b.root_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(make_node(Op::Mul, 0.0, a.root_, b.root_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(make_node(Op::Div, 0.0, a.root_, b.root_)); }
Expr operator-(const Expr& a) { return Expr(make_node(Op::Neg, 0.0, a.root_)); }
Expr pow(const Expr& base, const Expr& exponent) {
  return Expr(make_node(Op::Pow, 0.0, base.root_, exponent.root_));
}

}  // namespace driftbound
