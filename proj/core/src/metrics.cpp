#include "dfovu/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace dfovu {

double compute_ra(double f_found, double f_bar) {
  const double ratio = (f_found - f_bar) / (1.0 + std::abs(f_bar));
  // max(1e-16, .) also absorbs gaps at or below zero.
  return std::max(0.0, -std::log10(std::max(1e-16, ratio)));
}

int v_found_of(const EvalRecord& rec) { return static_cast<int>(rec.active.size()) - 1; }

int compute_v_found(GreyBox& oracle, const Vector& x_found) { return v_found_of(oracle.evaluate(x_found)); }

}  // namespace dfovu
