// Recursive-descent parser for rate expressions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'n' | fn '(' expr (',' expr)* ')' | '(' expr ')'

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "altbd/error.hpp"
#include "altbd/rate_spec.hpp"

namespace altbd::expr {

namespace {

using Op = ExprNode::Op;

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr parse_all() {
    ExprPtr root = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      fail({"operator", "end of input"}, "unexpected character '" + std::string(1, text_[pos_]) + "'");
    }
    return root;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
    throw ParseError(pos_, std::move(expected), detail);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Op::kAdd, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(Op::kSub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Op::kMul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(Op::kDiv, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (accept('-')) return neg(parse_unary());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (accept('^')) return binary(Op::kPow, base, parse_unary());
    return base;
  }

  ExprPtr parse_primary() {
    skip_ws();
    static const std::vector<std::string> kOperand = {"number", "n", "function", "(", "-"};
    if (pos_ >= text_.size()) fail(kOperand, "unexpected end of input");
    const char c = text_[pos_];
    if (is_digit(c) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      ExprPtr inner = parse_expr();
      if (!accept(')')) fail({")", "operator"}, "unbalanced parenthesis");
      return inner;
    }
    if (is_alpha(c)) return parse_identifier();
    fail(kOperand, "unexpected character '" + std::string(1, c) + "'");
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ - start == 1 && text_[start] == '.') {
      pos_ = start;
      fail({"number"}, "malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && is_digit(text_[p])) {
        while (p < text_.size() && is_digit(text_[p])) ++p;
        pos_ = p;
      } else {
        pos_ = p;
        fail({"digit"}, "malformed exponent");
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail({"number"}, "malformed number");
    }
    return number(value);
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (is_alpha(text_[pos_]) || is_digit(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "n") return var();

    Op fn;
    std::size_t arity = 1;
    if (name == "abs") {
      fn = Op::kAbs;
    } else if (name == "ln") {
      fn = Op::kLn;
    } else if (name == "exp") {
      fn = Op::kExp;
    } else if (name == "min") {
      fn = Op::kMin;
      arity = 2;
    } else if (name == "max") {
      fn = Op::kMax;
      arity = 2;
    } else {
      pos_ = start;
      fail({"n", "abs", "ln", "exp", "min", "max"}, "unknown identifier '" + std::string(name) + "'");
    }
    if (!accept('(')) fail({"("}, "function call needs '('");
    std::vector<ExprPtr> args;
    args.push_back(parse_expr());
    while (args.size() < arity) {
      if (!accept(',')) fail({","}, std::string(name) + " takes " + std::to_string(arity) + " arguments");
      args.push_back(parse_expr());
    }
    if (!accept(')')) fail({")"}, "too many arguments or unbalanced parenthesis");
    return call(fn, std::move(args));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Binding strength used when rendering; higher binds tighter.
int precedence(Op op) {
  switch (op) {
    case Op::kAdd:
    case Op::kSub: return 1;
    case Op::kMul:
    case Op::kDiv: return 2;
    case Op::kNeg: return 3;
    case Op::kPow: return 4;
    default: return 5;
  }
}

const char* function_name(Op op) {
  switch (op) {
    case Op::kAbs: return "abs";
    case Op::kLn: return "ln";
    case Op::kExp: return "exp";
    case Op::kMin: return "min";
    case Op::kMax: return "max";
    default: return "?";
  }
}

void render(const ExprNode& node, std::string& out);

void render_child(const ExprNode& child, int min_prec, std::string& out) {
  const bool wrap = precedence(child.op) < min_prec ||
                    (child.op == Op::kNumber && child.value < 0);
  if (wrap) out += '(';
  render(child, out);
  if (wrap) out += ')';
}

void render(const ExprNode& node, std::string& out) {
  switch (node.op) {
    case Op::kNumber:
      out += format_number(node.value);
      return;
    case Op::kVar:
      out += 'n';
      return;
    case Op::kNeg:
      out += '-';
      render_child(*node.args[0], precedence(Op::kNeg), out);
      return;
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv: {
      const int p = precedence(node.op);
      render_child(*node.args[0], p, out);
      out += node.op == Op::kAdd ? " + " : node.op == Op::kSub ? " - " : node.op == Op::kMul ? "*" : "/";
      // Left association: an equal-precedence right operand needs parentheses.
      render_child(*node.args[1], p + 1, out);
      return;
    }
    case Op::kPow:
      render_child(*node.args[0], precedence(Op::kPow) + 1, out);
      out += '^';
      render_child(*node.args[1], precedence(Op::kNeg), out);
      return;
    case Op::kAbs:
    case Op::kLn:
    case Op::kExp:
    case Op::kMin:
    case Op::kMax:
      out += function_name(node.op);
      out += '(';
      for (std::size_t i = 0; i < node.args.size(); ++i) {
        if (i) out += ", ";
        render(*node.args[i], out);
      }
      out += ')';
      return;
  }
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorKind::kNonFinite, std::string("non-finite value in ") + what);
  return v;
}

}  // namespace

ExprPtr number(double value) {
  auto node = std::make_shared<ExprNode>();
  node->op = Op::kNumber;
  node->value = value;
  return node;
}

ExprPtr var() {
  auto node = std::make_shared<ExprNode>();
  node->op = Op::kVar;
  return node;
}

ExprPtr neg(ExprPtr operand) {
  auto node = std::make_shared<ExprNode>();
  node->op = Op::kNeg;
  node->args.push_back(std::move(operand));
  return node;
}

ExprPtr binary(Op op, ExprPtr lhs, ExprPtr rhs) {
  auto node = std::make_shared<ExprNode>();
  node->op = op;
  node->args.push_back(std::move(lhs));
  node->args.push_back(std::move(rhs));
  return node;
}

ExprPtr call(Op fn, std::vector<ExprPtr> args) {
  auto node = std::make_shared<ExprNode>();
  node->op = fn;
  node->args = std::move(args);
  return node;
}

ExprPtr parse(std::string_view text) { return Parser(text).parse_all(); }

double evaluate(const ExprNode& node, double n) {
  const auto arg = [&](std::size_t i) { return evaluate(*node.args[i], n); };
  switch (node.op) {
    case Op::kNumber: return checked(node.value, "literal");
    case Op::kVar: return n;
    case Op::kNeg: return -arg(0);
    case Op::kAdd: return checked(arg(0) + arg(1), "addition");
    case Op::kSub: return checked(arg(0) - arg(1), "subtraction");
    case Op::kMul: return checked(arg(0) * arg(1), "multiplication");
    case Op::kDiv: {
      const double den = arg(1);
      if (den == 0.0) throw Error(ErrorKind::kNonFinite, "division by zero");
      return checked(arg(0) / den, "division");
    }
    case Op::kPow: return checked(std::pow(arg(0), arg(1)), "power");
    case Op::kAbs: return std::fabs(arg(0));
    case Op::kLn: {
      const double x = arg(0);
      if (!(x > 0.0)) throw Error(ErrorKind::kNonFinite, "ln of a non-positive value");
      return std::log(x);
    }
    case Op::kExp: return checked(std::exp(arg(0)), "exp");
    case Op::kMin: return std::min(arg(0), arg(1));
    case Op::kMax: return std::max(arg(0), arg(1));
  }
  throw Error(ErrorKind::kInvalidArgument, "corrupt expression tree");
}

std::string to_text(const ExprNode& node) {
  std::string out;
  render(node, out);
  return out;
}

ExprPtr substitute(const ExprPtr& tree, const ExprPtr& replacement) {
  if (tree->op == Op::kVar) return replacement;
  if (tree->args.empty()) return tree;
  auto node = std::make_shared<ExprNode>(*tree);
  for (auto& a : node->args) a = substitute(a, replacement);
  return node;
}

}  // namespace altbd::expr
