#pragma once

namespace marginflow {

// Inputs to the margin-based generalization bound. The margin gamma is
// user-supplied (measured from training); C bounds |f| on the support,
// C = R + 1 for unit-norm predictors on |x| <= R. Rad defaults to the
// unit-ball Rademacher bound 1/sqrt(n).
struct BoundInputs {
  double gamma = 0.0;
  double C = 0.0;
  long n = 1;
  double delta = 0.05;
  double rad = -1.0;  // < 0 picks 1/sqrt(n)
};

struct MarginBound {
  double raw = 0.0;      // three-term sum, may exceed 1
  double clamped = 0.0;  // raw clamped to [0, 1]
  double term_complexity = 0.0;  // 4 Rad / gamma
  double term_levels = 0.0;      // sqrt(log(log2(4C/gamma)) / n)
  double term_confidence = 0.0;  // sqrt(log(1/delta) / (2n))
};

// P[y f(x) < 0] <= 4 Rad/gamma + sqrt(log(log2(4C/gamma))/n)
//                + sqrt(log(1/delta)/(2n)).
// Throws std::domain_error when log2(4C/gamma) <= 1 (the level count is
// undefined there) or on out-of-range inputs.
MarginBound margin_bound(const BoundInputs& inputs);

}  // namespace marginflow
