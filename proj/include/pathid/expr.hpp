#pragma once

#include <memory>
#include <set>
#include <string>

#include "pathid/polynomial.hpp"

namespace pathid {

/// Real-valued arithmetic expression over named parameters.
///
/// Grammar: numbers, identifiers, the constant `pi`, unary minus, `+ - * /`
/// and parentheses. Used for element parameters that may be bound at run time
/// (phases swept by `sweep`, transmissions set from the command line).
class Expr {
 public:
  Expr();
  Expr(double value);  // NOLINT(google-explicit-constructor): constants convert implicitly
  static Expr parse(const std::string& text);
  static Expr parameter(const std::string& name);

  /// Throws UnboundParameter for a missing name.
  double eval(const Bindings& bindings) const;
  std::set<std::string> parameters() const;
  bool is_constant() const { return parameters().empty(); }

  /// Canonical text; parse(str()) reproduces an equal expression.
  const std::string& str() const { return text_; }

  friend bool operator==(const Expr& a, const Expr& b) { return a.text_ == b.text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace pathid
