#pragma once

#include "dfovu/greybox.hpp"

namespace dfovu {

/// Digits of accuracy: max(0, -log10(max(1e-16, (f_found - f_bar) / (1 + |f_bar|)))).
/// A gap at or below zero clamps to 16.
double compute_ra(double f_found, double f_bar);

/// |A(x)| - 1 from an existing record; no oracle call.
int v_found_of(const EvalRecord& rec);

/// Evaluates once at x_found and returns |A(x_found)| - 1.
int compute_v_found(GreyBox& oracle, const Vector& x_found);

}  // namespace dfovu
