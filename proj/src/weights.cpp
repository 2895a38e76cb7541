#include "cesarolab/weights.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

#include "cesarolab/common.hpp"

namespace cesarolab {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  WeightExprPtr run() {
    WeightExprPtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input after weight expression");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])))) {
      ++pos_;
    }
    if (pos_ == start) fail("expected weight name");
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    std::size_t start = pos_;
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + text_.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr == first) fail("expected a number");
    if (!std::isfinite(value)) fail("number out of range");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return value;
  }

  WeightExprPtr expr() {
    skip_ws();
    std::size_t name_pos = pos_;
    std::string name = ident();
    if (name == "one") {
      return std::make_shared<WeightExpr>(WeightExpr{WeightKind::One, 0, 0, nullptr, nullptr});
    }
    if (name == "pow" || name == "pow2") {
      expect('(');
      std::size_t num_pos = pos_;
      double alpha = number();
      expect(')');
      if (!(alpha > -1.0)) throw ParseError("exponent must exceed -1", num_pos);
      return std::make_shared<WeightExpr>(WeightExpr{
          name == "pow" ? WeightKind::Pow : WeightKind::Pow2, alpha, 0, nullptr, nullptr});
    }
    if (name == "exp") {
      expect('(');
      std::size_t c_pos = pos_;
      double c = number();
      expect(',');
      std::size_t b_pos = pos_;
      double beta = number();
      expect(')');
      if (!(c > 0.0)) throw ParseError("exp rate must be positive", c_pos);
      if (!(beta > 0.0)) throw ParseError("exp exponent must be positive", b_pos);
      return std::make_shared<WeightExpr>(WeightExpr{WeightKind::Exp, c, beta, nullptr, nullptr});
    }
    if (name == "loginv") {
      expect('(');
      std::size_t p_pos = pos_;
      double p = number();
      expect(')');
      if (!(p > 1.0)) throw ParseError("loginv exponent must exceed 1", p_pos);
      return std::make_shared<WeightExpr>(WeightExpr{WeightKind::LogInv, p, 0, nullptr, nullptr});
    }
    if (name == "scale") {
      expect('(');
      WeightExprPtr child = expr();
      expect(',');
      std::size_t s_pos = pos_;
      double s = number();
      expect(')');
      if (!(s > 0.0)) throw ParseError("scale factor must be positive", s_pos);
      return std::make_shared<WeightExpr>(WeightExpr{WeightKind::Scale, s, 0, child, nullptr});
    }
    if (name == "sum") {
      expect('(');
      WeightExprPtr lhs = expr();
      expect(',');
      WeightExprPtr rhs = expr();
      expect(')');
      return std::make_shared<WeightExpr>(WeightExpr{WeightKind::Sum, 0, 0, lhs, rhs});
    }
    throw ParseError("unknown weight '" + name + "'", name_pos);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string render(const WeightExpr& e) {
  switch (e.kind) {
    case WeightKind::One:
      return "one";
    case WeightKind::Pow:
      return "pow(" + format_double_shortest(e.p1) + ")";
    case WeightKind::Pow2:
      return "pow2(" + format_double_shortest(e.p1) + ")";
    case WeightKind::Exp:
      return "exp(" + format_double_shortest(e.p1) + "," + format_double_shortest(e.p2) + ")";
    case WeightKind::LogInv:
      return "loginv(" + format_double_shortest(e.p1) + ")";
    case WeightKind::Scale:
      return "scale(" + render(*e.a) + "," + format_double_shortest(e.p1) + ")";
    case WeightKind::Sum:
      return "sum(" + render(*e.a) + "," + render(*e.b) + ")";
  }
  return {};
}

SupportHint hint_of(const WeightExpr& e) {
  switch (e.kind) {
    case WeightKind::One:
      return {0.0, false, false};
    case WeightKind::Pow:
    case WeightKind::Pow2:
      return {e.p1, false, false};
    case WeightKind::Exp:
      return {0.0, true, false};
    case WeightKind::LogInv:
      return {-1.0, false, true};
    case WeightKind::Scale:
      return hint_of(*e.a);
    case WeightKind::Sum: {
      SupportHint ha = hint_of(*e.a);
      SupportHint hb = hint_of(*e.b);
      SupportHint out;
      // Near r = 1 the slower-decaying summand dominates.
      if (ha.essential_decay && hb.essential_decay) {
        out.essential_decay = true;
      } else if (ha.essential_decay) {
        out = hb;
      } else if (hb.essential_decay) {
        out = ha;
      } else {
        out.endpoint_exponent = std::min(ha.endpoint_exponent, hb.endpoint_exponent);
        out.log_factor = ha.log_factor || hb.log_factor;
      }
      return out;
    }
  }
  return {};
}

double log_eval(const WeightExpr& e, double delta) {
  switch (e.kind) {
    case WeightKind::One:
      return 0.0;
    case WeightKind::Pow:
      return e.p1 * std::log(delta);
    case WeightKind::Pow2:
      // 1 - r^2 = delta * (2 - delta)
      return e.p1 * (std::log(delta) + std::log(2.0 - delta));
    case WeightKind::Exp:
      return -e.p1 * std::exp(-e.p2 * std::log(delta));
    case WeightKind::LogInv:
      // log(e / delta) = 1 - log(delta)
      return -std::log(delta) - e.p1 * std::log(1.0 - std::log(delta));
    case WeightKind::Scale:
      return std::log(e.p1) + log_eval(*e.a, delta);
    case WeightKind::Sum:
      return logsumexp2(log_eval(*e.a, delta), log_eval(*e.b, delta));
  }
  return kNegInf;
}

}  // namespace

double log_evaluate_expr_at(const WeightExpr& e, double delta) { return log_eval(e, delta); }

bool structurally_equal(const WeightExpr& lhs, const WeightExpr& rhs) {
  if (lhs.kind != rhs.kind || lhs.p1 != rhs.p1 || lhs.p2 != rhs.p2) return false;
  if (static_cast<bool>(lhs.a) != static_cast<bool>(rhs.a)) return false;
  if (static_cast<bool>(lhs.b) != static_cast<bool>(rhs.b)) return false;
  if (lhs.a && !structurally_equal(*lhs.a, *rhs.a)) return false;
  if (lhs.b && !structurally_equal(*lhs.b, *rhs.b)) return false;
  return true;
}

RadialWeight::RadialWeight(WeightExprPtr expr)
    : expr_(std::move(expr)), label_(render(*expr_)), id_(fnv1a64_hex(label_)), hint_(hint_of(*expr_)) {}

RadialWeight RadialWeight::parse(std::string_view text) {
  Parser p(text);
  return RadialWeight(p.run());
}

double RadialWeight::evaluate(double r) const {
  if (!(r >= 0.0) || !(r < 1.0)) {
    throw std::invalid_argument("RadialWeight::evaluate: r must lie in [0, 1)");
  }
  return std::exp(log_evaluate_at(1.0 - r));
}

double RadialWeight::log_evaluate_at(double delta) const {
  if (!(delta > 0.0) || !(delta <= 1.0)) {
    throw std::invalid_argument("RadialWeight::log_evaluate_at: delta must lie in (0, 1]");
  }
  return log_eval(*expr_, delta);
}

}  // namespace cesarolab
