#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace altbd {

/// Syntax tree of a rate expression over the single variable `n`.
struct ExprNode {
  enum class Op { kNumber, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow, kAbs, kLn, kExp, kMin, kMax };

  Op op = Op::kNumber;
  double value = 0.0;  // kNumber only
  std::vector<std::shared_ptr<const ExprNode>> args;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

namespace expr {

ExprPtr number(double value);
ExprPtr var();
ExprPtr neg(ExprPtr operand);
ExprPtr binary(ExprNode::Op op, ExprPtr lhs, ExprPtr rhs);
ExprPtr call(ExprNode::Op fn, std::vector<ExprPtr> args);

inline ExprPtr add(ExprPtr a, ExprPtr b) { return binary(ExprNode::Op::kAdd, std::move(a), std::move(b)); }
inline ExprPtr sub(ExprPtr a, ExprPtr b) { return binary(ExprNode::Op::kSub, std::move(a), std::move(b)); }
inline ExprPtr mul(ExprPtr a, ExprPtr b) { return binary(ExprNode::Op::kMul, std::move(a), std::move(b)); }
inline ExprPtr div(ExprPtr a, ExprPtr b) { return binary(ExprNode::Op::kDiv, std::move(a), std::move(b)); }

/// Parses `text` with the rate grammar. Throws ParseError.
ExprPtr parse(std::string_view text);

/// Evaluates the tree at `n`. Any non-finite intermediate (division by zero,
/// ln of a non-positive number, overflow) raises Error(kNonFinite).
double evaluate(const ExprNode& node, double n);

/// Renders the tree in the rate grammar; parse(to_text(t)) is equivalent to t.
std::string to_text(const ExprNode& node);

/// Replaces every occurrence of the variable with `replacement`.
ExprPtr substitute(const ExprPtr& tree, const ExprPtr& replacement);

}  // namespace expr

/// A level-indexed, non-negative rate function.
class RateSpec {
 public:
  struct Constant {
    double value = 0.0;
  };
  struct Affine {
    double a = 0.0;
    double b = 0.0;
  };
  struct Table {
    std::map<std::int64_t, double> entries;
    std::shared_ptr<const RateSpec> tail;
  };
  struct Expression {
    ExprPtr tree;
    std::string source;
  };
  using Variant = std::variant<Constant, Affine, Table, Expression>;

  RateSpec() : v_(Constant{}) {}

  static RateSpec constant(double value);
  static RateSpec affine(double a, double b);
  static RateSpec table(std::map<std::int64_t, double> entries, RateSpec tail);
  static RateSpec expression(ExprPtr tree, std::string source = {});

  /// Throws Error(kNegativeRate) or Error(kNonFinite).
  double eval(std::int64_t n) const;

  const Variant& variant() const noexcept { return v_; }

  /// Expression-tree view of constant, affine and expression specs. Tables
  /// have no tree form and raise Error(kInvalidArgument).
  ExprPtr to_expr() const;

  /// Canonical one-line description (used in diagnostics and preset listings).
  std::string describe() const;

 private:
  explicit RateSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

double eval_rate(const RateSpec& spec, std::int64_t n);

/// Parses a rate expression into an expression RateSpec. Throws ParseError.
RateSpec parse_rate_expr(std::string_view text);

}  // namespace altbd
