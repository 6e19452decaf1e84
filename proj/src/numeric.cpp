#include "ddp/numeric.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddp {

namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
  const double diff = left + right - p.whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol || !(lm > p.a && rm < p.b)) {
    return left + right + diff / 15.0;
  }
  return refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, tol / 2.0, depth - 1) +
         refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, SimpsonOptions opt) {
  if (a == b) {
    return 0.0;
  }
  if (b < a) {
    return -adaptive_simpson(f, b, a, opt);
  }
  // A coarse 9-point pass sets the tolerance scale and seeds four panels, so
  // narrow features are less likely to be missed by the first comparison.
  constexpr int coarse = 8;
  std::array<double, coarse + 1> xs{};
  std::array<double, coarse + 1> fs{};
  for (int i = 0; i <= coarse; ++i) {
    xs[i] = i == coarse ? b : a + (b - a) * i / coarse;
    fs[i] = f(xs[i]);
  }
  double estimate = 0.0;
  for (int i = 0; i < coarse; i += 2) {
    estimate += simpson(xs[i], xs[i + 2], fs[i], fs[i + 1], fs[i + 2]);
  }
  const double tol = std::max(opt.rel_tol * std::abs(estimate), opt.abs_floor);
  double total = 0.0;
  for (int i = 0; i < coarse; i += 2) {
    const Panel p{xs[i], xs[i + 1], xs[i + 2], fs[i], fs[i + 1], fs[i + 2],
                  simpson(xs[i], xs[i + 2], fs[i], fs[i + 1], fs[i + 2])};
    total += refine(f, p, tol / 4.0, opt.max_depth);
  }
  return total;
}

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("gamma_fn needs a finite positive argument");
  }
  return std::tgamma(x);
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("beta_fn needs positive arguments");
  }
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace ddp
