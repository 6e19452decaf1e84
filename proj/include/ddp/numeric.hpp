#pragma once

#include <functional>

namespace ddp {

struct SimpsonOptions {
  double rel_tol = 1e-8;
  double abs_floor = 1e-14;
  int max_depth = 40;
};

/// Adaptive Simpson quadrature of f over [a, b] with Richardson correction.
/// The tolerance is relative to a coarse whole-interval estimate, floored at
/// `abs_floor`; recursion stops at `max_depth`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, SimpsonOptions opt = {});

/// Gamma function for finite x > 0.
double gamma_fn(double x);
/// Euler Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b).
double beta_fn(double a, double b);

}  // namespace ddp
