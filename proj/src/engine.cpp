#include "ddp/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace ddp {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::size_t particle_count(const ReturnApprox& eta) {
  std::size_t n = 0;
  for (const auto& f : eta) n += f.size();
  return n;
}

void check_truth(const MdpSpec& mdp, const std::optional<std::vector<Distribution>>& truth) {
  if (truth && truth->size() != mdp.num_states()) {
    throw std::invalid_argument("ground truth has " + std::to_string(truth->size()) + " states, MDP has " +
                                std::to_string(mdp.num_states()));
  }
}

}  // namespace

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<MetricResult> compare(const ReturnApprox& eta, const std::vector<Distribution>& truth,
                                  const std::vector<MetricSpec>& metrics) {
  if (eta.size() != truth.size()) {
    throw std::invalid_argument("approximation and ground truth have different state counts");
  }
  const auto approx = as_distributions(eta);
  std::vector<MetricResult> out;
  for (const auto& m : metrics) {
    MetricResult r{m.name(), {}, {}};
    for (std::size_t s = 0; s < eta.size(); ++s) {
      r.per_state.push_back(evaluate(m, approx[s], truth[s]));
    }
    for (const auto& v : r.per_state) {
      if (v.is_infinite()) {
        r.value = v;
        break;
      }
      if (v.value > r.value.value) r.value = v;
    }
    out.push_back(std::move(r));
  }
  return out;
}

RunReport run_ddp(const MdpSpec& mdp, const RunConfig& cfg) { return run_ddp(mdp, cfg, nullptr); }

RunReport run_ddp(const MdpSpec& mdp, const RunConfig& cfg, const PhaseHook& after_parameters) {
  const auto start = Clock::now();
  require_valid(mdp);
  const ScheduleConfig sched = resolve_schedule(cfg.schedule, mdp.gamma);
  if (sched.algo == Algo::qdp && !has_finite_rewards(mdp)) {
    throw std::invalid_argument("QDP requires finitely supported rewards");
  }
  if (cfg.track_projection_error && !has_finite_rewards(mdp)) {
    throw std::invalid_argument("projection-error tracking requires finitely supported rewards");
  }
  check_truth(mdp, cfg.ground_truth);
  if (cfg.trace_metrics && !cfg.metrics.empty() && !cfg.ground_truth) {
    throw std::invalid_argument("tracing metrics needs a ground truth");
  }

  ReturnApprox eta = cfg.initial ? *cfg.initial : constant_approx(mdp.num_states());
  require_matching(mdp, eta);

  RunReport report;
  report.algorithm = to_string(sched.algo);
  report.seed = cfg.seed;
  const std::size_t ns = mdp.num_states();
  const MetricSpec w1_metric{MetricKind::wasserstein, 1.0};

  for (std::size_t k = 1; k <= cfg.max_iterations; ++k) {
    if (since(start) >= cfg.max_seconds) break;

    // phase 1: parameters from eta^(k-1) only
    std::vector<ProjectionParam> params(ns);
    std::size_t qdp_m = 0;
    if (sched.algo == Algo::qdp) {
      qdp_m = size_schedule(sched, k).m;
    } else {
      parallel_for(ns, cfg.threads, [&](std::size_t s) {
        switch (sched.algo) {
          case Algo::ppa:
            params[s] = ppa_params(sched, k);
            break;
          case Algo::adp:
            params[s] = adp_params(mdp, s, eta, k, sched);
            break;
          case Algo::qsp:
            params[s] = qsp_params(mdp, s, eta, k, sched);
            break;
          case Algo::qdp:
            break;
        }
      });
    }
    if (after_parameters) after_parameters(k, eta);

    // phase 2: projections of T eta^(k-1)
    std::vector<std::optional<FiniteDist>> next(ns);
    parallel_for(ns, cfg.threads, [&](std::size_t s) {
      next[s] = sched.algo == Algo::qdp ? qdp_update(mdp, s, eta, qdp_m) : project_bellman(mdp, s, eta, params[s]);
    });

    IterationRecord rec{};
    rec.k = k;
    if (cfg.track_projection_error) {
      std::vector<double> pe(ns);
      parallel_for(ns, cfg.threads, [&](std::size_t s) {
        const auto target = Distribution::finite(materialize_bellman_finite(mdp, s, eta));
        pe[s] = evaluate(w1_metric, Distribution::finite(*next[s]), target).value;
      });
      rec.projection_error = *std::max_element(pe.begin(), pe.end());
    }

    ReturnApprox updated;
    updated.reserve(ns);
    for (auto& f : next) updated.push_back(std::move(*f));
    eta = std::move(updated);

    rec.total_particles = particle_count(eta);
    for (const auto& f : eta) rec.states.push_back({f.size(), f.front(), f.back()});
    if (cfg.trace_metrics && cfg.ground_truth) {
      for (const auto& r : compare(eta, *cfg.ground_truth, cfg.metrics)) rec.metrics.push_back(r.value);
    }
    rec.seconds = since(start);
    report.iterations.push_back(std::move(rec));
  }

  report.seconds = since(start);
  if (cfg.ground_truth && !cfg.metrics.empty()) {
    report.metrics = compare(eta, *cfg.ground_truth, cfg.metrics);
  }
  report.final = std::move(eta);
  return report;
}

RunReport run_mc(const MdpSpec& mdp, const McConfig& cfg) {
  const auto start = Clock::now();
  require_valid(mdp);
  check_truth(mdp, cfg.ground_truth);
  if (cfg.horizon < 1) {
    throw std::invalid_argument("horizon must be at least 1");
  }
  const std::size_t ns = mdp.num_states();
  std::size_t per_state = cfg.samples;
  if (cfg.particle_budget) {
    if (*cfg.particle_budget == 0) throw std::invalid_argument("particle budget must be positive");
    per_state = std::max<std::size_t>(1, *cfg.particle_budget / ns);
  }
  const bool timed = per_state == 0;
  if (timed && !std::isfinite(cfg.max_seconds)) {
    throw std::invalid_argument("Monte-Carlo needs a sample count, particle budget or time budget");
  }
  if (timed && !(cfg.max_seconds > 0.0)) {
    throw std::invalid_argument("Monte-Carlo time budget must be positive");
  }

  const Philox root(cfg.seed);
  std::vector<std::vector<double>> samples(ns);
  auto draw = [&](std::size_t from, std::size_t to) {
    for (std::size_t s = 0; s < ns; ++s) {
      samples[s].resize(to);
      const Philox state_stream = root.substream(s);
      parallel_for(to - from, cfg.threads, [&](std::size_t i) {
        Philox rng = state_stream.substream(from + i);
        samples[s][from + i] = sample_truncated_return(mdp, s, cfg.horizon, rng);
      });
    }
  };
  if (!timed) {
    draw(0, per_state);
  } else {
    constexpr std::size_t round = 1000;
    std::size_t have = 0;
    do {
      draw(have, have + round);
      have += round;
    } while (since(start) < cfg.max_seconds);
  }

  RunReport report;
  report.algorithm = "mc";
  report.seed = cfg.seed;
  for (auto& v : samples) {
    const std::vector<double> ones(v.size(), 1.0);
    report.final.push_back(FiniteDist::from_particles(v, ones));
  }
  IterationRecord rec{};
  rec.k = 1;
  rec.total_particles = particle_count(report.final);
  for (const auto& f : report.final) rec.states.push_back({f.size(), f.front(), f.back()});
  rec.seconds = since(start);
  report.iterations.push_back(std::move(rec));
  if (cfg.ground_truth && !cfg.metrics.empty()) {
    report.metrics = compare(report.final, *cfg.ground_truth, cfg.metrics);
  }
  report.seconds = since(start);
  return report;
}

}  // namespace ddp
