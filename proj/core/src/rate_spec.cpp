#include <charconv>
#include <cmath>
#include <sstream>

#include "altbd/error.hpp"
#include "altbd/rate_spec.hpp"

namespace altbd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double finalize(double v, std::int64_t n) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::kNonFinite, "rate is not finite at n=" + std::to_string(n));
  }
  if (v < 0.0) {
    throw Error(ErrorKind::kNegativeRate, "rate is negative at n=" + std::to_string(n));
  }
  return v == 0.0 ? 0.0 : v;  // folds -0.0
}

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

RateSpec RateSpec::constant(double value) { return RateSpec(Constant{value}); }

RateSpec RateSpec::affine(double a, double b) { return RateSpec(Affine{a, b}); }

RateSpec RateSpec::table(std::map<std::int64_t, double> entries, RateSpec tail) {
  return RateSpec(Table{std::move(entries), std::make_shared<const RateSpec>(std::move(tail))});
}

RateSpec RateSpec::expression(ExprPtr tree, std::string source) {
  if (!tree) throw Error(ErrorKind::kInvalidArgument, "empty expression tree");
  if (source.empty()) source = expr::to_text(*tree);
  return RateSpec(Expression{std::move(tree), std::move(source)});
}

double RateSpec::eval(std::int64_t n) const {
  return std::visit(
      Overloaded{
          [n](const Constant& c) { return finalize(c.value, n); },
          [n](const Affine& f) { return finalize(f.a + f.b * static_cast<double>(n), n); },
          [n](const Table& t) {
            const auto it = t.entries.find(n);
            if (it != t.entries.end()) return finalize(it->second, n);
            return t.tail->eval(n);
          },
          [n](const Expression& e) { return finalize(expr::evaluate(*e.tree, static_cast<double>(n)), n); },
      },
      v_);
}

ExprPtr RateSpec::to_expr() const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return expr::number(c.value); },
          [](const Affine& f) { return expr::add(expr::number(f.a), expr::mul(expr::number(f.b), expr::var())); },
          [](const Table&) -> ExprPtr {
            throw Error(ErrorKind::kInvalidArgument, "table rate specs have no expression form");
          },
          [](const Expression& e) { return e.tree; },
      },
      v_);
}

std::string RateSpec::describe() const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return num(c.value); },
          [](const Affine& f) { return num(f.a) + " + " + num(f.b) + "*n"; },
          [](const Table& t) {
            std::ostringstream os;
            os << "table{";
            bool first = true;
            for (const auto& [k, v] : t.entries) {
              os << (first ? "" : ", ") << k << ": " << num(v);
              first = false;
            }
            os << "; tail: " << t.tail->describe() << "}";
            return os.str();
          },
          [](const Expression& e) { return e.source; },
      },
      v_);
}

double eval_rate(const RateSpec& spec, std::int64_t n) { return spec.eval(n); }

RateSpec parse_rate_expr(std::string_view text) {
  return RateSpec::expression(expr::parse(text), std::string(text));
}

}  // namespace altbd
