#include "accm/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "accm/error.hpp"

namespace accm {

struct Expression::Node {
  enum class Op { Const, State, Param, Neg, Add, Sub, Mul, Div, Pow, Tanh, Sin, Cos, Exp };
  Op op = Op::Const;
  double value = 0.0;
  int index = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr leaf(Node::Op op, double value, int index = 0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->index = index;
  return n;
}

NodePtr make(Node::Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(const std::string& text, int num_states, int num_params)
      : text_(text), num_states_(num_states), num_params_(num_params) {}

  NodePtr run() {
    NodePtr e = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ConfigError, "expression \"" + text_ + "\": " + what + " at column " +
                                            std::to_string(pos_ + 1));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Node::Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Node::Op::Pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return leaf(Node::Op::Const, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = text_.substr(start, pos_ - start);
      return named(name, start);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr named(const std::string& name, std::size_t start) {
    static const std::pair<const char*, Node::Op> funcs[] = {
        {"tanh", Node::Op::Tanh}, {"sin", Node::Op::Sin}, {"cos", Node::Op::Cos},
        {"exp", Node::Op::Exp}};
    for (const auto& [fname, op] : funcs) {
      if (name == fname) {
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make(op, arg);
      }
    }
    if (name == "pi") return leaf(Node::Op::Const, M_PI);
    auto index_of = [&](std::size_t prefix, int limit) {
      const std::string digits = name.substr(prefix);
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) return -1;
      const int i = std::stoi(digits);
      return (i >= 1 && i <= limit) ? i - 1 : -2;
    };
    if (name.rfind("th", 0) == 0) {
      const int i = index_of(2, num_params_);
      if (i >= 0) return leaf(Node::Op::Param, 0.0, i);
      if (i == -2) {
        pos_ = start;
        fail("parameter '" + name + "' out of range (have " + std::to_string(num_params_) + ")");
      }
    } else if (name[0] == 'x') {
      const int i = index_of(1, num_states_);
      if (i >= 0) return leaf(Node::Op::State, 0.0, i);
      if (i == -2) {
        pos_ = start;
        fail("state '" + name + "' out of range (have " + std::to_string(num_states_) + ")");
      }
    }
    pos_ = start;
    fail("unknown name '" + name + "'");
  }

  const std::string& text_;
  int num_states_;
  int num_params_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, const Eigen::VectorXd& x, const Eigen::VectorXd& theta) {
  switch (n.op) {
    case Node::Op::Const: return n.value;
    case Node::Op::State: return x(n.index);
    case Node::Op::Param: return theta(n.index);
    case Node::Op::Neg: return -eval(*n.lhs, x, theta);
    case Node::Op::Add: return eval(*n.lhs, x, theta) + eval(*n.rhs, x, theta);
    case Node::Op::Sub: return eval(*n.lhs, x, theta) - eval(*n.rhs, x, theta);
    case Node::Op::Mul: return eval(*n.lhs, x, theta) * eval(*n.rhs, x, theta);
    case Node::Op::Div: return eval(*n.lhs, x, theta) / eval(*n.rhs, x, theta);
    case Node::Op::Pow: {
      const double e = eval(*n.rhs, x, theta);
      const double b = eval(*n.lhs, x, theta);
      if (e == 2.0) return b * b;
      return std::pow(b, e);
    }
    case Node::Op::Tanh: return std::tanh(eval(*n.lhs, x, theta));
    case Node::Op::Sin: return std::sin(eval(*n.lhs, x, theta));
    case Node::Op::Cos: return std::cos(eval(*n.lhs, x, theta));
    case Node::Op::Exp: return std::exp(eval(*n.lhs, x, theta));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text, int num_states, int num_params) {
  Expression e;
  e.root_ = Parser(text, num_states, num_params).run();
  e.source_ = text;
  return e;
}

double Expression::operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& theta) const {
  if (!root_) throw Error(ErrorKind::InvalidArgument, "empty expression");
  return eval(*root_, x, theta);
}

double Expression::operator()(const Eigen::VectorXd& x) const {
  return (*this)(x, Eigen::VectorXd());
}

}  // namespace accm
