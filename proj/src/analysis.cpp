#include "ddp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ddp/numeric.hpp"

namespace ddp {

double polylog_neg(double r, double z) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("polylog_neg needs r > 0");
  }
  if (!(z > 0.0 && z < 1.0)) {
    throw std::invalid_argument("polylog_neg needs 0 < z < 1");
  }
  // terms k^r z^k peak near k = r / log(1/z); only stop after the peak
  const double peak = r / -std::log(z);
  double sum = 0.0;
  for (long k = 1;; ++k) {
    const auto kd = static_cast<double>(k);
    const double term = std::exp(r * std::log(kd) + kd * std::log(z));
    sum += term;
    if (kd > peak && term < 1e-15 * sum) {
      break;
    }
  }
  return sum;
}

double ape_bound(const ApePattern& p, double gamma_c, std::size_t n) {
  if (!(gamma_c > 0.0 && gamma_c < 1.0)) {
    throw std::invalid_argument("gamma^c must lie in (0,1)");
  }
  if (!(p.D > 0.0)) {
    throw std::invalid_argument("APE pattern needs D > 0");
  }
  const auto nd = static_cast<double>(n);
  switch (p.kind) {
    case ApePattern::Kind::constant:
      return p.D / (1.0 - gamma_c);
    case ApePattern::Kind::polynomial:
      if (n < 1) throw std::invalid_argument("polynomial APE bound needs n >= 1");
      return p.D * polylog_neg(p.r, gamma_c) / gamma_c * std::pow(nd, -p.r);
    case ApePattern::Kind::exponential: {
      if (!(p.theta > 0.0 && p.theta < 1.0)) {
        throw std::invalid_argument("theta must lie in (0,1)");
      }
      if (p.theta < gamma_c) return p.D / (gamma_c / p.theta - 1.0) * std::pow(gamma_c, nd);
      if (p.theta == gamma_c) return p.D * nd * std::pow(gamma_c, nd);
      return p.D / (1.0 - gamma_c / p.theta) * std::pow(p.theta, nd);
    }
  }
  throw std::logic_error("unhandled APE pattern");
}

double qdp_error(double gamma, double span, const ScheduleConfig& schedule, std::size_t n) {
  double e = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    e = gamma * e + span / (2.0 * static_cast<double>(size_schedule(schedule, k).m));
  }
  return e + std::pow(gamma, static_cast<double>(n)) * span;
}

double qdp_time(const ScheduleConfig& schedule, std::size_t n) {
  double t = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto m = static_cast<double>(size_schedule(schedule, k).m);
    t += m * std::log(m);
  }
  return t;
}

std::size_t qdp_iterations_within(const ScheduleConfig& schedule, double T, std::size_t n_max) {
  double t = 0.0;
  std::size_t n = 0;
  while (n < n_max) {
    const auto m = static_cast<double>(size_schedule(schedule, n + 1).m);
    if (t + m * std::log(m) > T) break;
    t += m * std::log(m);
    ++n;
  }
  return n;
}

double qdp_constant_bound(double gamma, double span, std::size_t m, std::size_t n) {
  return span * (1.0 / (2.0 * static_cast<double>(m) * (1.0 - gamma)) + std::pow(gamma, static_cast<double>(n)));
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 2) {
    throw std::invalid_argument("log grid needs 0 < lo <= hi and at least two points");
  }
  std::vector<double> out(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<TradeoffPoint> qdp_curve(double gamma, double span, const ScheduleConfig& schedule,
                                     const std::vector<double>& Ts, std::size_t n_max) {
  if (Ts.empty()) {
    throw std::invalid_argument("empty time grid");
  }
  std::vector<TradeoffPoint> out;
  out.reserve(Ts.size());
  for (double T : Ts) {
    const std::size_t n = qdp_iterations_within(schedule, T, n_max);
    out.push_back({T, n, qdp_error(gamma, span, schedule, n)});
  }
  return out;
}

double tail_bound(const MomentInfo& info, double w, double beta, TailFlavor flavor) {
  if (!(w > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("tail bound needs w > 0 and beta > 0");
  }
  if (flavor == TailFlavor::l_beta && !(beta >= 1.0)) {
    throw std::invalid_argument("l_beta tail bound needs beta >= 1");
  }
  switch (info.kind) {
    case MomentInfo::Kind::bounded:
      return 0.0;
    case MomentInfo::Kind::polynomial: {
      const double a = info.alpha;
      if (flavor == TailFlavor::w_beta) {
        if (!(a > beta)) throw std::invalid_argument("w_beta tail bound needs alpha > beta");
        return beta_fn(beta, a - beta) * info.moment / std::pow(w, a - beta);
      }
      if (!(a * beta > 1.0)) throw std::invalid_argument("l_beta tail bound needs alpha * beta > 1");
      return std::pow(info.moment, beta) / ((a * beta - 1.0) * std::pow(w, a * beta - 1.0));
    }
    case MomentInfo::Kind::exponential: {
      const double l = info.lambda;
      if (!(l > 0.0)) throw std::invalid_argument("exponential tail bound needs lambda > 0");
      if (flavor == TailFlavor::w_beta) {
        return gamma_fn(beta) * info.moment / (std::pow(l, beta) * std::exp(l * w));
      }
      return std::pow(info.moment, beta) / (l * beta * std::exp(l * beta * w));
    }
  }
  throw std::logic_error("unhandled moment kind");
}

double tail_integral(const Distribution& dist, double z, double w, double beta, TailFlavor flavor) {
  if (!(w >= 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("tail integral needs w >= 0 and beta > 0");
  }
  auto exceed = [&](double x) { return ccdf(dist, z + w + x) + cdf_left(dist, z - w - x); };
  auto term = [&](double x) {
    const double p = std::min(1.0, exceed(x));
    return flavor == TailFlavor::w_beta ? std::pow(x, beta - 1.0) * p : std::pow(p, beta);
  };

  // [0, 1]: with x = y^{1/beta}, x^{beta-1} dx = dy / beta removes the singularity
  double head = 0.0;
  if (flavor == TailFlavor::w_beta) {
    head = adaptive_simpson([&](double y) { return std::min(1.0, exceed(std::pow(y, 1.0 / beta))); }, 0.0, 1.0) /
           beta;
  } else {
    head = adaptive_simpson(term, 0.0, 1.0);
  }

  // Cauchy tails decay like 1/x
  if (dist.kind() == DistKind::cauchy &&
      ((flavor == TailFlavor::w_beta && beta >= 1.0) || (flavor == TailFlavor::l_beta && beta <= 1.0))) {
    return INFINITY;
  }

  // [1, inf): x = v^{-k}
  double k = 2.0;
  if (dist.kind() == DistKind::cauchy) {
    k = flavor == TailFlavor::w_beta ? (beta < 1.0 ? std::max(2.0, 2.0 / (1.0 - beta)) : 2.0)
                                     : (beta > 1.0 ? std::max(2.0, 2.0 / (beta - 1.0)) : 2.0);
  }
  const double rest = adaptive_simpson(
      [&](double v) {
        if (!(v > 0.0)) return 0.0;
        const double x = std::pow(v, -k);
        const double jac = k * std::pow(v, -k - 1.0);
        if (!std::isfinite(x) || !std::isfinite(jac)) return 0.0;
        const double val = term(x) * jac;
        return std::isfinite(val) ? val : 0.0;
      },
      0.0, 1.0);
  return head + rest;
}

double pe_bound(const AnalysisConfig& acfg, const PpaShape& shape, double beta, TailFlavor flavor) {
  if (!(acfg.gamma > 0.0 && acfg.gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0,1)");
  }
  if (shape.M < 2 || !(shape.W > 0.0)) {
    throw std::invalid_argument("PE bound needs M >= 2 and W > 0");
  }
  if (!(beta > 0.0) || (flavor == TailFlavor::l_beta && !(beta >= 1.0))) {
    throw std::invalid_argument("invalid metric order for PE bound");
  }
  const double delta = 2.0 * shape.W / static_cast<double>(shape.M - 1);
  const double bw = std::max(1.0, beta);
  const double grid_term = flavor == TailFlavor::w_beta ? std::pow(delta, beta / bw) : std::pow(delta, 1.0 / beta);
  const double width = (1.0 - acfg.gamma) * shape.W;
  const auto& mi = acfg.moments;

  double T = 0.0;
  switch (mi.kind) {
    case MomentInfo::Kind::bounded:
      if (!(shape.z - shape.W <= acfg.v_min && acfg.v_max <= shape.z + shape.W)) {
        throw std::invalid_argument("bounded case needs [v_min, v_max] inside [z - W, z + W]");
      }
      T = 0.0;
      break;
    case MomentInfo::Kind::polynomial: {
      const double a = mi.alpha;
      if (flavor == TailFlavor::w_beta) {
        if (!(a > beta)) throw std::invalid_argument("w_beta PE bound needs alpha > beta");
        T = std::pow(beta_fn(beta, a - beta) * mi.moment, 1.0 / bw) * std::pow(width, -(a - beta) / bw);
      } else {
        if (!(a * beta > 1.0)) throw std::invalid_argument("l_beta PE bound needs alpha * beta > 1");
        T = std::pow(a * beta - 1.0, -1.0 / beta) * mi.moment * std::pow(width, -(a - 1.0 / beta));
      }
      break;
    }
    case MomentInfo::Kind::exponential: {
      const double l = mi.lambda;
      if (!(l > 0.0)) throw std::invalid_argument("exponential PE bound needs lambda > 0");
      if (flavor == TailFlavor::w_beta) {
        T = std::pow(gamma_fn(beta) * std::pow(l, -beta) * mi.moment, 1.0 / bw) * std::exp(-l * width / bw);
      } else {
        T = std::pow(l * beta, -1.0 / beta) * mi.moment * std::exp(-l * width);
      }
      break;
    }
  }
  return 4.0 * std::max(grid_term, T);
}

std::pair<double, double> moment_quantile_bound(double alpha, double D, double u) {
  if (!(alpha > 0.0) || !(D >= 0.0)) {
    throw std::invalid_argument("moment bound needs alpha > 0 and D >= 0");
  }
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("quantile level must lie in (0,1)");
  }
  const double root = std::pow(D, 1.0 / alpha);
  return {-root / std::pow(u, 1.0 / alpha), root / std::pow(1.0 - u, 1.0 / alpha)};
}

AdpExponents recommended_adp_exponents(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be finite and positive");
  }
  const double ratio = (alpha + 1.0) / alpha;
  return {alpha / (alpha + 1.0), ratio * ratio, ratio};
}

std::vector<Distribution> circular_reference(const std::vector<Distribution>& cycle_rewards, double gamma) {
  if (cycle_rewards.empty()) {
    throw std::invalid_argument("cycle needs at least one reward");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0,1)");
  }
  bool any_normal = false;
  bool any_cauchy = false;
  const std::size_t n = cycle_rewards.size();
  std::vector<double> loc(n);
  std::vector<double> spread(n);  // variance (normal) or scale (cauchy)
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = cycle_rewards[i].variant();
    if (const auto* d = std::get_if<Dirac>(&v)) {
      loc[i] = d->point;
      spread[i] = 0.0;
    } else if (const auto* nm = std::get_if<Normal>(&v)) {
      loc[i] = nm->mu;
      spread[i] = nm->sigma2;
      any_normal = true;
    } else if (const auto* c = std::get_if<Cauchy>(&v)) {
      loc[i] = c->mu;
      spread[i] = c->scale;
      any_cauchy = true;
    } else {
      throw std::invalid_argument("circular reference supports normal, cauchy and dirac rewards only");
    }
  }
  if (any_normal && any_cauchy) {
    throw std::invalid_argument("circular reference cannot mix normal and cauchy rewards");
  }
  const auto nd = static_cast<double>(n);
  // variances scale with gamma^2, cauchy scales and locations with gamma
  const double spread_rate = any_normal ? gamma * gamma : gamma;
  std::vector<Distribution> out;
  out.reserve(n);
  for (std::size_t start = 0; start < n; ++start) {
    double l = 0.0;
    double s = 0.0;
    double gl = 1.0;
    double gs = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = (start + j) % n;
      l += gl * loc[idx];
      s += gs * spread[idx];
      gl *= gamma;
      gs *= spread_rate;
    }
    l /= 1.0 - std::pow(gamma, nd);
    s /= 1.0 - std::pow(spread_rate, nd);
    if (s == 0.0) {
      out.push_back(Distribution::dirac(l));
    } else if (any_normal) {
      out.push_back(Distribution::normal(l, s));
    } else {
      out.push_back(Distribution::cauchy(l, s));
    }
  }
  return out;
}

std::optional<std::vector<Distribution>> auto_circular(const MdpSpec& mdp) {
  const std::size_t ns = mdp.num_states();
  if (ns == 0 || mdp.num_actions() != 1) {
    return std::nullopt;
  }
  std::vector<std::size_t> next(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto br = branches(mdp, s);
    if (br.size() != 1 || br.front().weight != 1.0) {
      return std::nullopt;
    }
    next[s] = br.front().next;
  }
  // single cycle through every state, starting at state 0
  std::vector<std::size_t> order;
  std::vector<bool> seen(ns, false);
  std::size_t s = 0;
  while (!seen[s]) {
    seen[s] = true;
    order.push_back(s);
    s = next[s];
  }
  if (s != 0 || order.size() != ns) {
    return std::nullopt;
  }
  std::vector<Distribution> cycle;
  for (std::size_t i = 0; i < ns; ++i) {
    cycle.push_back(mdp.rewards[order[i]][0][next[order[i]]]);
  }
  std::vector<Distribution> laws;
  try {
    laws = circular_reference(cycle, mdp.gamma);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  std::vector<Distribution> out(laws);
  for (std::size_t i = 0; i < ns; ++i) {
    out[order[i]] = laws[i];
  }
  return out;
}

}  // namespace ddp
