#include "ddp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "ddp/numeric.hpp"

namespace ddp {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double ks_resolution = 1e-6;

double powb(double x, double beta) {
  if (beta == 1.0) return x;
  if (beta == 2.0) return x * x;
  return std::pow(x, beta);
}

std::optional<FiniteDist> as_finite(const Distribution& d) {
  if (const auto* f = std::get_if<FiniteDist>(&d.variant())) {
    return *f;
  }
  if (const auto* p = std::get_if<Dirac>(&d.variant())) {
    return FiniteDist::point_mass(p->point);
  }
  return std::nullopt;
}

bool is_cauchy(const Distribution& d) { return d.kind() == DistKind::cauchy; }

bool bounded(const Distribution& d) {
  const auto [lo, hi] = support(d);
  return std::isfinite(lo) && std::isfinite(hi);
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double ks_discrete(const FiniteDist& a, const FiniteDist& b) {
  double best = 0.0;
  for (double x : a.points()) {
    best = std::max(best, std::abs(a.cdf(x) - b.cdf(x)));
  }
  for (double x : b.points()) {
    best = std::max(best, std::abs(a.cdf(x) - b.cdf(x)));
  }
  return best;
}

double ks_mixed(const FiniteDist& a, const Distribution& nu) {
  double best = 0.0;
  double before = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double F = cdf(nu, a.points()[i]);
    const double after = a.cumulative()[i];
    best = std::max({best, std::abs(after - F), std::abs(before - F)});
    before = after;
  }
  return best;
}

// Branch and bound: on [a, b] both CDFs are monotone, so
// |F_mu - F_nu| <= max(|F_mu(b) - F_nu(a)|, |F_mu(a) - F_nu(b)|).
double ks_continuous(const Distribution& mu, const Distribution& nu) {
  struct Pt {
    double x, fm, fn;
  };
  auto at = [&](double x) -> Pt {
    if (x == -inf) return {x, 0.0, 0.0};
    if (x == inf) return {x, 1.0, 1.0};
    return {x, cdf(mu, x), cdf(nu, x)};
  };

  std::vector<double> grid;
  constexpr int n0 = 64;
  for (int j = 1; j < n0; ++j) {
    const double u = static_cast<double>(j) / n0;
    grid.push_back(quantile(mu, u));
    grid.push_back(quantile(nu, u));
  }
  for (const auto* d : {&mu, &nu}) {
    const auto [lo, hi] = support(*d);
    if (std::isfinite(lo)) grid.push_back(lo);
    if (std::isfinite(hi)) grid.push_back(hi);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double best = 0.0;
  std::vector<std::pair<Pt, Pt>> work;
  Pt prev = at(-inf);
  for (double x : grid) {
    const Pt cur = at(x);
    best = std::max(best, std::abs(cur.fm - cur.fn));
    work.emplace_back(prev, cur);
    prev = cur;
  }
  work.emplace_back(prev, at(inf));

  while (!work.empty()) {
    const auto [l, r] = work.back();
    work.pop_back();
    const double bound = std::max(std::abs(r.fm - l.fn), std::abs(l.fm - r.fn));
    if (bound <= best) continue;
    if (std::max(r.fm - l.fm, r.fn - l.fn) <= ks_resolution) continue;
    double mid = 0.0;
    if (l.x == -inf) {
      const double u = std::max(r.fm, r.fn) / 2.0;
      if (!(u > 0.0)) continue;
      mid = std::min(quantile(mu, u), quantile(nu, u));
      if (!(mid < r.x)) continue;
    } else if (r.x == inf) {
      const double q = std::max(ccdf(mu, l.x), ccdf(nu, l.x)) / 2.0;
      if (!(q > 0.0)) continue;
      mid = std::max(upper_quantile(mu, q), upper_quantile(nu, q));
      if (!(mid > l.x)) continue;
    } else {
      mid = l.x + (r.x - l.x) / 2.0;
      if (!(mid > l.x && mid < r.x)) continue;
    }
    const Pt m = at(mid);
    best = std::max(best, std::abs(m.fm - m.fn));
    work.emplace_back(l, m);
    work.emplace_back(m, r);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Quantile-space integrals for w_beta

// Exponent k of the tail substitution 1-u = q w^k (or u = q w^k).
double wasserstein_tail_power(const Distribution& a, const Distribution& b, double beta) {
  if ((is_cauchy(a) || is_cauchy(b)) && beta < 1.0) {
    return std::max(2.0, 2.0 / (1.0 - beta));
  }
  return 2.0;
}

// int_lo^hi g(u) du where g may be singular at u = 0 and/or u = 1.
double integrate_u(const std::function<double(double)>& g_inner, const std::function<double(double)>& g_upper,
                   double lo, double hi, double k) {
  if (!(hi > lo)) return 0.0;
  if (lo == 0.0 && hi == 1.0) {
    return integrate_u(g_inner, g_upper, 0.0, 0.5, k) + integrate_u(g_inner, g_upper, 0.5, 1.0, k);
  }
  if (lo == 0.0) {
    return adaptive_simpson(
        [&](double w) {
          if (!(w > 0.0)) return 0.0;
          const double u = hi * std::pow(w, k);
          if (!(u > 0.0)) return 0.0;
          return g_inner(u) * hi * k * std::pow(w, k - 1.0);
        },
        0.0, 1.0);
  }
  if (hi == 1.0) {
    // g_upper takes q = 1 - u so the upper tail keeps full precision
    const double q0 = 1.0 - lo;
    return adaptive_simpson(
        [&](double w) {
          if (!(w > 0.0)) return 0.0;
          const double q = q0 * std::pow(w, k);
          if (!(q > 0.0)) return 0.0;
          return g_upper(q) * q0 * k * std::pow(w, k - 1.0);
        },
        0.0, 1.0);
  }
  return adaptive_simpson(g_inner, lo, hi);
}

// int_0^u F^{-1}(v) dv for families with closed-form partial expectations.
std::optional<double> partial_expectation(const Distribution& d, double u) {
  if (const auto* n = std::get_if<Normal>(&d.variant())) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return n->mu;
    const double z = normal_math::phi_quantile(u);
    return n->mu * u - std::sqrt(n->sigma2) * normal_math::phi_pdf(z);
  }
  if (const auto* un = std::get_if<Uniform>(&d.variant())) {
    const double v = std::clamp(u, 0.0, 1.0);
    return un->a * v + (un->b - un->a) * v * v / 2.0;
  }
  if (const auto* e = std::get_if<Exponential>(&d.variant())) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0 / e->rate;
    const double l = std::log1p(-u);
    return ((1.0 - u) * l + u) / e->rate;
  }
  return std::nullopt;
}

bool has_partial_expectation(const Distribution& d) {
  return d.kind() == DistKind::normal || d.kind() == DistKind::uniform || d.kind() == DistKind::exponential;
}

// int_a^b |x - Q_nu(u)|^beta du
double cell_integral(double x, const Distribution& nu, double a, double b, double beta, double k) {
  const double us = std::clamp(cdf(nu, x), a, b);
  if (beta == 1.0 && has_partial_expectation(nu)) {
    const double Ia = *partial_expectation(nu, a);
    const double Ib = *partial_expectation(nu, b);
    const double Is = *partial_expectation(nu, us);
    const double below = x * (us - a) - (Is - Ia);
    const double above = (Ib - Is) - x * (b - us);
    return std::max(0.0, below) + std::max(0.0, above);
  }
  auto inner = [&](double u) { return powb(std::abs(x - quantile(nu, u)), beta); };
  auto upper = [&](double q) { return powb(std::abs(x - upper_quantile(nu, q)), beta); };
  return integrate_u(inner, upper, a, us, k) + integrate_u(inner, upper, us, b, k);
}

double wbeta_finite_finite(const FiniteDist& a, const FiniteDist& b, double beta) {
  double total = 0.0;
  double u = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const double next = std::min(a.cumulative()[i], b.cumulative()[j]);
    const double len = next - u;
    if (len > 0.0) {
      total += len * powb(std::abs(a.points()[i] - b.points()[j]), beta);
    }
    u = std::max(u, next);
    if (a.cumulative()[i] <= next) ++i;
    if (b.cumulative()[j] <= next) ++j;
  }
  return total;
}

double wbeta_finite_continuous(const FiniteDist& a, const Distribution& nu, double beta) {
  const double k = wasserstein_tail_power(nu, nu, beta);
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double c = a.cumulative()[i];
    if (c > prev) {
      total += cell_integral(a.points()[i], nu, prev, c, beta, k);
    }
    prev = c;
  }
  return total;
}

double wbeta_continuous(const Distribution& mu, const Distribution& nu, double beta) {
  const double k = wasserstein_tail_power(mu, nu, beta);
  auto inner = [&](double u) { return powb(std::abs(quantile(mu, u) - quantile(nu, u)), beta); };
  auto upper = [&](double q) { return powb(std::abs(upper_quantile(mu, q) - upper_quantile(nu, q)), beta); };
  return integrate_u(inner, upper, 0.0, 1.0, k);
}

ExtendedValue wasserstein_sup(const Distribution& mu, const Distribution& nu) {
  if (!bounded(mu) || !bounded(nu)) {
    return ExtendedValue::infinite("unbounded support");
  }
  const auto fa = as_finite(mu);
  const auto fb = as_finite(nu);
  double best = 0.0;
  if (fa && fb) {
    double u = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < fa->size() && j < fb->size()) {
      const double next = std::min(fa->cumulative()[i], fb->cumulative()[j]);
      if (next > u) {
        best = std::max(best, std::abs(fa->points()[i] - fb->points()[j]));
      }
      u = std::max(u, next);
      if (fa->cumulative()[i] <= next) ++i;
      if (fb->cumulative()[j] <= next) ++j;
    }
    return {best, {}};
  }
  if (!fa && !fb) {
    // both uniform: the quantile difference is affine in u
    const auto [a1, b1] = support(mu);
    const auto [a2, b2] = support(nu);
    return {std::max(std::abs(a1 - a2), std::abs(b1 - b2)), {}};
  }
  const FiniteDist& f = fa ? *fa : *fb;
  const Distribution& cont = fa ? nu : mu;
  const auto [lo, hi] = support(cont);
  auto q = [&](double u) { return u <= 0.0 ? lo : (u >= 1.0 ? hi : quantile(cont, u)); };
  double prev = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double c = f.cumulative()[i];
    if (c > prev) {
      best = std::max({best, std::abs(f.points()[i] - q(prev)), std::abs(f.points()[i] - q(c))});
    }
    prev = c;
  }
  return {best, {}};
}

// ---------------------------------------------------------------------------
// x-space integrals for l_beta

std::vector<double> breakpoints(const Distribution& d) {
  std::vector<double> out;
  if (auto f = as_finite(d)) {
    return f->points();
  }
  constexpr int n0 = 16;
  for (int j = 1; j < n0; ++j) {
    out.push_back(quantile(d, static_cast<double>(j) / n0));
  }
  const auto [lo, hi] = support(d);
  if (std::isfinite(lo)) out.push_back(lo);
  if (std::isfinite(hi)) out.push_back(hi);
  return out;
}

double lbeta_finite_finite(const FiniteDist& a, const FiniteDist& b, double beta) {
  std::vector<double> pts = a.points();
  pts.insert(pts.end(), b.points().begin(), b.points().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    const double gap = std::abs(a.cdf(pts[j]) - b.cdf(pts[j]));
    if (gap > 0.0) {
      total += powb(gap, beta) * (pts[j + 1] - pts[j]);
    }
  }
  return total;
}

double lbeta_general(const Distribution& mu, const Distribution& nu, double beta) {
  std::vector<double> pts = breakpoints(mu);
  const auto more = breakpoints(nu);
  pts.insert(pts.end(), more.begin(), more.end());
  // crossing points of a step CDF with a continuous one
  for (const auto& [step, cont] : {std::pair{&mu, &nu}, std::pair{&nu, &mu}}) {
    if (auto f = as_finite(*step); f && !cont->is_discrete()) {
      for (std::size_t i = 0; i + 1 < f->size(); ++i) {
        const double c = f->cumulative()[i];
        if (c > 0.0 && c < 1.0) pts.push_back(quantile(*cont, c));
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const bool mu_step = mu.is_discrete();
  const bool nu_step = nu.is_discrete();
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    const double a = pts[j];
    const double b = pts[j + 1];
    const double mid = a + (b - a) / 2.0;
    // step CDFs are constant on the open segment; freeze them at its midpoint
    const double fm_const = mu_step ? cdf(mu, mid) : 0.0;
    const double fn_const = nu_step ? cdf(nu, mid) : 0.0;
    if (mu_step && nu_step) {
      total += powb(std::abs(fm_const - fn_const), beta) * (b - a);
      continue;
    }
    total += adaptive_simpson(
        [&](double x) {
          const double fm = mu_step ? fm_const : cdf(mu, x);
          const double fn = nu_step ? fn_const : cdf(nu, x);
          return powb(std::abs(fm - fn), beta);
        },
        a, b);
  }

  // tails: x = edge -/+ L (w^{-k} - 1), w in (0, 1]
  const double lo = pts.front();
  const double hi = pts.back();
  const double L = std::max(hi - lo, 1e-12 * std::max(1.0, std::abs(lo)));
  const double k = (is_cauchy(mu) || is_cauchy(nu)) && beta > 1.0 ? std::max(2.0, 2.0 / (beta - 1.0)) : 2.0;
  auto tail = [&](bool left) {
    return adaptive_simpson(
        [&, left](double w) {
          if (!(w > 0.0)) return 0.0;
          const double stretch = L * (std::pow(w, -k) - 1.0);
          const double jac = L * k * std::pow(w, -k - 1.0);
          if (!std::isfinite(stretch) || !std::isfinite(jac)) return 0.0;
          double gap = 0.0;
          if (left) {
            const double x = lo - stretch;
            gap = std::abs(cdf_left(mu, x) - cdf_left(nu, x));
          } else {
            const double x = hi + stretch;
            gap = std::abs(ccdf(mu, x) - ccdf(nu, x));
          }
          const double v = powb(gap, beta) * jac;
          return std::isfinite(v) ? v : 0.0;
        },
        0.0, 1.0);
  };
  total += tail(true) + tail(false);
  return total;
}

std::string format_beta(double beta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", beta);
  return buf;
}

}  // namespace

bool ExtendedValue::is_infinite() const noexcept { return std::isinf(value); }

ExtendedValue ExtendedValue::infinite(std::string why) { return {inf, std::move(why)}; }

double ks(const Distribution& mu, const Distribution& nu) {
  const auto fa = as_finite(mu);
  const auto fb = as_finite(nu);
  if (fa && fb) return ks_discrete(*fa, *fb);
  if (fa) return ks_mixed(*fa, nu);
  if (fb) return ks_mixed(*fb, mu);
  return ks_continuous(mu, nu);
}

ExtendedValue wasserstein(const Distribution& mu, const Distribution& nu, double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("wasserstein order must be positive");
  }
  if (std::isinf(beta)) {
    return wasserstein_sup(mu, nu);
  }
  const bool inf_mu = moment_order(mu, beta) == Moment::infinite;
  const bool inf_nu = moment_order(nu, beta) == Moment::infinite;
  if (inf_mu != inf_nu) {
    return ExtendedValue::infinite("infinite beta-moment on one side");
  }
  if (inf_mu) {
    const auto& a = std::get<Cauchy>(mu.variant());
    const auto& b = std::get<Cauchy>(nu.variant());
    if (a.scale == b.scale) return {std::abs(a.mu - b.mu), {}};
    return ExtendedValue::infinite("cauchy pair with different scales");
  }
  const auto fa = as_finite(mu);
  const auto fb = as_finite(nu);
  double raw = 0.0;
  if (fa && fb) {
    raw = wbeta_finite_finite(*fa, *fb, beta);
  } else if (fa) {
    raw = wbeta_finite_continuous(*fa, nu, beta);
  } else if (fb) {
    raw = wbeta_finite_continuous(*fb, mu, beta);
  } else {
    raw = wbeta_continuous(mu, nu, beta);
  }
  return {beta < 1.0 ? raw : std::pow(raw, 1.0 / beta), {}};
}

ExtendedValue lp_cdf_distance(const Distribution& mu, const Distribution& nu, double beta) {
  if (!(beta >= 1.0) || std::isinf(beta)) {
    throw std::invalid_argument("cdf distance order must be finite and >= 1");
  }
  const double order = 1.0 / beta;
  const bool inf_mu = moment_order(mu, order) == Moment::infinite;
  const bool inf_nu = moment_order(nu, order) == Moment::infinite;
  if (inf_mu != inf_nu) {
    return ExtendedValue::infinite("infinite 1/beta-moment on one side");
  }
  if (inf_mu) {
    const auto& a = std::get<Cauchy>(mu.variant());
    const auto& b = std::get<Cauchy>(nu.variant());
    if (a.scale == b.scale) return {std::abs(a.mu - b.mu), {}};
    return ExtendedValue::infinite("cauchy pair with different scales");
  }
  const auto fa = as_finite(mu);
  const auto fb = as_finite(nu);
  const double raw = fa && fb ? lbeta_finite_finite(*fa, *fb, beta) : lbeta_general(mu, nu, beta);
  return {std::pow(raw, 1.0 / beta), {}};
}

MetricSpec MetricSpec::parse(const std::string& name) {
  auto order = [&](std::size_t prefix) {
    std::size_t used = 0;
    const std::string tail = name.substr(prefix);
    double b = 0.0;
    try {
      b = std::stod(tail, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad metric order in '" + name + "'");
    }
    if (used != tail.size()) {
      throw std::invalid_argument("bad metric order in '" + name + "'");
    }
    return b;
  };
  if (name == "ks") return {MetricKind::ks, 1.0};
  if (name == "w1") return {MetricKind::wasserstein, 1.0};
  if (name == "l2") return {MetricKind::cdf_lp, 2.0};
  if (name.rfind("wbeta:", 0) == 0) {
    const double b = order(6);
    if (!(b > 0.0)) throw std::invalid_argument("wasserstein order must be positive");
    return {MetricKind::wasserstein, b};
  }
  if (name.rfind("lbeta:", 0) == 0) {
    const double b = order(6);
    if (!(b >= 1.0) || std::isinf(b)) throw std::invalid_argument("cdf distance order must be finite and >= 1");
    return {MetricKind::cdf_lp, b};
  }
  throw std::invalid_argument("unknown metric '" + name + "'");
}

std::string MetricSpec::name() const {
  switch (kind) {
    case MetricKind::ks:
      return "ks";
    case MetricKind::wasserstein:
      return beta == 1.0 ? "w1" : "wbeta:" + format_beta(beta);
    case MetricKind::cdf_lp:
      return beta == 2.0 ? "l2" : "lbeta:" + format_beta(beta);
  }
  return "?";
}

double MetricSpec::homogeneity() const {
  switch (kind) {
    case MetricKind::ks:
      return 0.0;
    case MetricKind::wasserstein:
      return std::min(1.0, beta);
    case MetricKind::cdf_lp:
      return 1.0 / beta;
  }
  return 0.0;
}

std::vector<MetricSpec> parse_metric_list(const std::string& csv) {
  std::vector<MetricSpec> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(MetricSpec::parse(item));
  }
  return out;
}

ExtendedValue evaluate(const MetricSpec& metric, const Distribution& mu, const Distribution& nu) {
  switch (metric.kind) {
    case MetricKind::ks:
      return {ks(mu, nu), {}};
    case MetricKind::wasserstein:
      return wasserstein(mu, nu, metric.beta);
    case MetricKind::cdf_lp:
      return lp_cdf_distance(mu, nu, metric.beta);
  }
  throw std::logic_error("unhandled metric kind");
}

ExtendedValue max_over_states(const MetricSpec& metric, const std::vector<Distribution>& eta,
                              const std::vector<Distribution>& eta_star) {
  if (eta.size() != eta_star.size()) {
    throw std::invalid_argument("state sets differ in size");
  }
  ExtendedValue best;
  for (std::size_t s = 0; s < eta.size(); ++s) {
    auto v = evaluate(metric, eta[s], eta_star[s]);
    if (v.is_infinite()) return v;
    if (v.value > best.value) best = std::move(v);
  }
  return best;
}

std::vector<Distribution> as_distributions(const ReturnApprox& eta) {
  std::vector<Distribution> out;
  out.reserve(eta.size());
  for (const auto& f : eta) {
    out.push_back(Distribution::finite(f));
  }
  return out;
}

double ks_from_wasserstein_bound(double w_val, double beta, const HolderParams& hp) {
  if (!(w_val >= 0.0) || !(beta > 0.0) || !(hp.M > 0.0) || !(hp.rho > 0.0 && hp.rho <= 1.0)) {
    throw std::invalid_argument("ks bound needs w >= 0, beta > 0, M > 0, rho in (0,1]");
  }
  const double a = hp.rho / (hp.rho + beta);
  return std::pow(a, -a) * std::pow(hp.M, 1.0 - a) * std::pow(w_val, a * std::max(1.0, beta));
}

double density_sup_bound(double ks_val, double delta, const HolderParams& hp) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("density bound needs delta > 0");
  }
  if (!(ks_val >= 0.0) || !(hp.C > 0.0) || !(hp.tau > 0.0 && hp.tau <= 1.0)) {
    throw std::invalid_argument("density bound needs ks >= 0, C > 0, tau in (0,1]");
  }
  return ks_val / delta + hp.C * std::pow(delta, hp.tau);
}

}  // namespace ddp
