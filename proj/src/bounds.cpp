#include "marginflow/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace marginflow {

MarginBound margin_bound(const BoundInputs& inputs) {
  if (inputs.gamma <= 0.0) throw std::domain_error("margin_bound: gamma must be positive");
  if (inputs.C <= 0.0) throw std::domain_error("margin_bound: C must be positive");
  if (inputs.n < 1) throw std::domain_error("margin_bound: n must be >= 1");
  if (inputs.delta <= 0.0 || inputs.delta >= 1.0)
    throw std::domain_error("margin_bound: delta must be in (0, 1)");

  const double n = static_cast<double>(inputs.n);
  const double rad = inputs.rad < 0.0 ? 1.0 / std::sqrt(n) : inputs.rad;
  const double levels = std::log2(4.0 * inputs.C / inputs.gamma);
  if (levels <= 1.0) throw std::domain_error("margin_bound: log2(4C/gamma) <= 1, level count undefined");

  MarginBound out;
  out.term_complexity = 4.0 * rad / inputs.gamma;
  out.term_levels = std::sqrt(std::log(levels) / n);
  out.term_confidence = std::sqrt(std::log(1.0 / inputs.delta) / (2.0 * n));
  out.raw = out.term_complexity + out.term_levels + out.term_confidence;
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

}  // namespace marginflow
