#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace cesarolab {

enum class WeightKind { One, Pow, Pow2, Exp, LogInv, Scale, Sum };

// Immutable expression node. Parameter slots by kind:
//   Pow/Pow2: p1 = alpha        Exp: p1 = c, p2 = beta
//   LogInv:   p1 = p            Scale: p1 = factor, child a
//   Sum:      children a, b
struct WeightExpr {
  WeightKind kind;
  double p1 = 0.0;
  double p2 = 0.0;
  std::shared_ptr<const WeightExpr> a;
  std::shared_ptr<const WeightExpr> b;
};

using WeightExprPtr = std::shared_ptr<const WeightExpr>;

bool structurally_equal(const WeightExpr& lhs, const WeightExpr& rhs);

// log of the expression's value at r = 1 - delta; used by integrators that
// walk sub-expressions directly.
double log_evaluate_expr_at(const WeightExpr& e, double delta);

// Endpoint behavior summary used to describe (and route) integration near r = 1.
struct SupportHint {
  double endpoint_exponent = 0.0;  // w(r) ~ (1-r)^exponent up to slow factors
  bool essential_decay = false;    // exp-type factor dominates near r = 1
  bool log_factor = false;         // loginv-type slowly varying factor present
};

class RadialWeight {
 public:
  // Grammar:  expr := atom | scale(expr, s) | sum(expr, expr)
  //           atom := one | pow(a) | pow2(a) | exp(c, b) | loginv(p)
  // Throws ParseError with a byte position on malformed or out-of-range input.
  static RadialWeight parse(std::string_view text);

  const std::string& label() const { return label_; }  // canonical, reparseable
  const std::string& id() const { return id_; }        // fnv1a64 hex of label
  const WeightExprPtr& expression() const { return expr_; }
  const SupportHint& support_hint() const { return hint_; }

  double evaluate(double r) const;              // value at r in [0, 1)
  double log_evaluate_at(double delta) const;   // log w(1 - delta), delta in (0, 1]

 private:
  explicit RadialWeight(WeightExprPtr expr);

  WeightExprPtr expr_;
  std::string label_;
  std::string id_;
  SupportHint hint_;
};

}  // namespace cesarolab
