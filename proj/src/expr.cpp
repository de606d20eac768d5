#include "pathid/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>
#include <vector>

#include "pathid/errors.hpp"

namespace pathid {

struct Expr::Node {
  enum class Op { Const, Param, Neg, Add, Sub, Mul, Div };
  Op op = Op::Const;
  double value = 0.0;
  std::string name;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    default: return 4;
  }
}

std::string render(const NodePtr& n) {
  switch (n->op) {
    case Op::Const: return format_number(n->value);
    case Op::Param: return n->name;
    case Op::Neg: {
      std::string inner = render(n->lhs);
      if (precedence(n->lhs->op) < 3) inner = "(" + inner + ")";
      return "-" + inner;
    }
    default: break;
  }
  const char* sym = n->op == Op::Add ? "+" : n->op == Op::Sub ? "-" : n->op == Op::Mul ? "*" : "/";
  int p = precedence(n->op);
  std::string l = render(n->lhs);
  std::string r = render(n->rhs);
  if (precedence(n->lhs->op) < p) l = "(" + l + ")";
  // Right operand of - and / needs parentheses at equal precedence.
  if (precedence(n->rhs->op) < p || (precedence(n->rhs->op) == p && (n->op == Op::Sub || n->op == Op::Div)))
    r = "(" + r + ")";
  return l + sym + r;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expression();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ValidationError("bad expression '" + s_ + "': " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr binary(Op op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }
  NodePtr expression() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = binary(Op::Add, n, term());
      else if (accept('-')) n = binary(Op::Sub, n, term());
      else return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = binary(Op::Mul, n, unary());
      else if (accept('/')) n = binary(Op::Div, n, unary());
      else return n;
    }
  }
  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Expr::Node>();
      n->op = Op::Neg;
      n->lhs = unary();
      return n;
    }
    if (accept('+')) return unary();
    return primary();
  }
  NodePtr primary() {
    skip();
    if (accept('(')) {
      NodePtr n = expression();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    if (pos_ >= s_.size()) fail("unexpected end");
    auto n = std::make_shared<Expr::Node>();
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      n->value = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      n->name = s_.substr(start, pos_ - start);
      n->op = Op::Param;
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double evaluate(const NodePtr& n, const Bindings& b) {
  switch (n->op) {
    case Op::Const: return n->value;
    case Op::Param: {
      auto it = b.find(n->name);
      if (it != b.end()) return it->second;
      if (n->name == "pi") return std::numbers::pi;
      throw UnboundParameter(n->name);
    }
    case Op::Neg: return -evaluate(n->lhs, b);
    case Op::Add: return evaluate(n->lhs, b) + evaluate(n->rhs, b);
    case Op::Sub: return evaluate(n->lhs, b) - evaluate(n->rhs, b);
    case Op::Mul: return evaluate(n->lhs, b) * evaluate(n->rhs, b);
    case Op::Div: return evaluate(n->lhs, b) / evaluate(n->rhs, b);
  }
  return 0.0;
}

void collect(const NodePtr& n, std::set<std::string>& out) {
  if (!n) return;
  if (n->op == Op::Param && n->name != "pi") out.insert(n->name);
  collect(n->lhs, out);
  collect(n->rhs, out);
}

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto n = std::make_shared<Node>();
  n->value = value;
  root_ = n;
  text_ = render(root_);
}

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.root_ = Parser(text).parse();
  e.text_ = render(e.root_);
  return e;
}

Expr Expr::parameter(const std::string& name) { return parse(name); }

double Expr::eval(const Bindings& bindings) const { return evaluate(root_, bindings); }

std::set<std::string> Expr::parameters() const {
  std::set<std::string> out;
  collect(root_, out);
  return out;
}

}  // namespace pathid
