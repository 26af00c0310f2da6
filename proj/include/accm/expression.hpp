#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>

namespace accm {

/// Scalar expression over the state x1..xn and parameters th1..thp.
///
/// Grammar:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | '+' unary | power
///   power  := atom ('^' unary)?              (right associative)
///   atom   := number | name | func '(' expr ')' | '(' expr ')'
///   func   := tanh | sin | cos | exp
///
/// Unary minus binds looser than '^', so -x1^2 is -(x1^2).
class Expression {
 public:
  struct Node;

  Expression() = default;

  /// Throws Error(ConfigError) naming the offending position.
  static Expression parse(const std::string& text, int num_states, int num_params = 0);

  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& theta) const;
  double operator()(const Eigen::VectorXd& x) const;

  const std::string& source() const { return source_; }
  bool empty() const { return !root_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace accm
