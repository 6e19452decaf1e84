#include "ddp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "ddp/analysis.hpp"
#include "ddp/engine.hpp"
#include "ddp/io.hpp"

namespace ddp::cli {

namespace {

struct TruthOptions {
  std::optional<std::string> ground_truth;
  std::optional<std::string> metrics;
};

struct OutputOptions {
  std::optional<std::string> prefix;
  bool no_timing = false;
};

struct RunOptions {
  std::string mdp_path;
  std::optional<std::string> run_config;
  std::optional<std::string> algo;
  std::optional<double> theta;
  std::optional<std::string> size_mode;
  std::optional<std::size_t> constant_m;
  std::optional<double> spline_fraction;
  std::optional<std::size_t> max_iterations;
  std::optional<double> max_seconds;
  std::optional<std::uint64_t> seed;
  bool trace_metrics = false;
  bool track_pe = false;
  TruthOptions truth;
  OutputOptions output;
};

struct McOptions {
  std::string mdp_path;
  int horizon = 30;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> particle_budget;
  std::optional<double> max_seconds;
  std::uint64_t seed = 0;
  TruthOptions truth;
  OutputOptions output;
};

struct CompareOptions {
  std::string mdp_path;
  std::string approx_path;
  TruthOptions truth;
  std::optional<std::string> output;
};

struct AnalyzeOptions {
  double gamma = 0.7;
  double span = 1.0;
  std::vector<double> thetas{0.85};
  std::vector<std::size_t> constant_ms{50, 200, 2000};
  std::size_t n_max = 70;
  std::size_t points = 200;
  std::optional<std::string> output;
};

void add_truth_options(CLI::App* app, TruthOptions& t) {
  app->add_option("--ground-truth", t.ground_truth,
                  "'auto-circular' or a JSON file of per-state distribution descriptors");
  app->add_option("--metrics", t.metrics, "Comma-separated list of ks, w1, l2, wbeta:<b>, lbeta:<b>");
}

void add_output_options(CLI::App* app, OutputOptions& o) {
  app->add_option("--output", o.prefix, "Write <prefix>.json, <prefix>.iterations.csv and <prefix>.particles.csv");
  app->add_flag("--no-timing", o.no_timing, "Write 0 for wall-clock fields");
}

std::vector<Distribution> resolve_truth(const std::string& arg, const MdpSpec& mdp) {
  if (arg == "auto-circular") {
    auto truth = auto_circular(mdp);
    if (!truth) {
      throw std::invalid_argument(
          "auto-circular ground truth needs one action, a deterministic cycle and normal or cauchy rewards");
    }
    return *truth;
  }
  return io::parse_ground_truth(io::read_json(arg));
}

/// Metric list and ground truth; the default list is ks,w1,l2 when a truth is given.
void resolve_metrics(const TruthOptions& t, const MdpSpec& mdp, std::optional<std::vector<Distribution>>& truth,
                     std::vector<MetricSpec>& metrics) {
  if (t.ground_truth) truth = resolve_truth(*t.ground_truth, mdp);
  if (t.metrics) metrics = parse_metric_list(*t.metrics);
  if (truth && metrics.empty()) metrics = parse_metric_list("ks,w1,l2");
  if (!metrics.empty() && !truth) {
    throw std::invalid_argument("metrics need a ground truth (--ground-truth)");
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot write " + path);
  }
  f << text;
  if (!f) {
    throw std::runtime_error("failed writing " + path);
  }
}

void emit_report(const RunReport& report, const MdpSpec& mdp, const std::vector<MetricSpec>& traced,
                 const OutputOptions& o, std::ostream& out) {
  const io::EmitOptions opts{o.no_timing};
  const std::string json = io::report_json(report, mdp, opts).dump(2) + "\n";
  if (!o.prefix) {
    out << json;
    return;
  }
  write_file(*o.prefix + ".json", json);
  std::ostringstream iters;
  io::write_iterations_csv(iters, report, traced, opts);
  write_file(*o.prefix + ".iterations.csv", iters.str());
  std::ostringstream particles;
  io::write_particles_csv(particles, report.final, mdp);
  write_file(*o.prefix + ".particles.csv", particles.str());

  out << report.algorithm << ": " << report.iterations.size() << " iteration(s), "
      << (report.iterations.empty() ? 0 : report.iterations.back().total_particles) << " particles\n";
  for (const auto& m : report.metrics) {
    out << m.name << " = " << io::format_number(m.value.value) << "\n";
  }
}

int do_validate(const std::string& path, std::ostream& out) {
  const MdpSpec mdp = io::load_mdp(path);
  const auto report = validate(mdp);
  for (const auto& v : report.violations) out << "violation: " << v << "\n";
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  if (!report.ok()) {
    return runtime_error;
  }
  out << "ok: " << mdp.num_states() << " state(s), " << mdp.num_actions() << " action(s), gamma " << mdp.gamma
      << "\n";
  return 0;
}

int do_run(const RunOptions& o, std::ostream& out) {
  const MdpSpec mdp = io::load_mdp(o.mdp_path);
  require_valid(mdp);

  io::RunFile rf;
  if (o.run_config) rf = io::parse_run_file(io::read_json(*o.run_config));

  RunConfig cfg;
  cfg.schedule = rf.schedule;
  if (o.algo) cfg.schedule.algo = parse_algo(*o.algo);
  if (o.theta) cfg.schedule.theta = *o.theta;
  if (o.size_mode) {
    if (*o.size_mode == "constant") {
      cfg.schedule.size_mode = SizeMode::constant;
    } else if (*o.size_mode == "exponential") {
      cfg.schedule.size_mode = SizeMode::exponential;
    } else {
      throw std::invalid_argument("unknown size mode '" + *o.size_mode + "'");
    }
  }
  if (o.constant_m) cfg.schedule.constant_m = *o.constant_m;
  if (o.spline_fraction) cfg.schedule.spline_fraction = *o.spline_fraction;
  cfg.max_iterations = o.max_iterations.value_or(rf.max_iterations.value_or(cfg.max_iterations));
  cfg.max_seconds = o.max_seconds.value_or(rf.max_seconds.value_or(cfg.max_seconds));
  if (!(cfg.max_seconds > 0.0)) {
    throw std::invalid_argument("max seconds must be positive");
  }
  cfg.seed = o.seed.value_or(rf.seed.value_or(0));
  cfg.initial = rf.initial;
  cfg.ground_truth = rf.ground_truth;
  if (rf.metrics) cfg.metrics = *rf.metrics;
  resolve_metrics(o.truth, mdp, cfg.ground_truth, cfg.metrics);
  cfg.trace_metrics = o.trace_metrics;
  cfg.track_projection_error = o.track_pe;
  cfg.threads = worker_threads();

  const RunReport report = run_ddp(mdp, cfg);
  emit_report(report, mdp, cfg.trace_metrics ? cfg.metrics : std::vector<MetricSpec>{}, o.output, out);
  return 0;
}

int do_mc(const McOptions& o, std::ostream& out) {
  const MdpSpec mdp = io::load_mdp(o.mdp_path);
  McConfig cfg;
  cfg.horizon = o.horizon;
  cfg.samples = o.samples.value_or(0);
  cfg.particle_budget = o.particle_budget;
  if (o.samples && *o.samples == 0) {
    throw std::invalid_argument("sample count must be positive");
  }
  if (o.max_seconds) cfg.max_seconds = *o.max_seconds;
  cfg.seed = o.seed;
  resolve_metrics(o.truth, mdp, cfg.ground_truth, cfg.metrics);
  cfg.threads = worker_threads();
  const RunReport report = run_mc(mdp, cfg);
  emit_report(report, mdp, {}, o.output, out);
  return 0;
}

int do_compare(const CompareOptions& o, std::ostream& out) {
  const MdpSpec mdp = io::load_mdp(o.mdp_path);
  require_valid(mdp);
  std::optional<std::vector<Distribution>> truth;
  std::vector<MetricSpec> metrics;
  resolve_metrics(o.truth, mdp, truth, metrics);
  if (!truth) {
    throw std::invalid_argument("compare needs --ground-truth");
  }
  const ReturnApprox eta = io::read_particles_csv(o.approx_path, mdp);
  const auto table = compare(eta, *truth, metrics);
  std::ostringstream csv;
  io::write_metric_table_csv(csv, table, mdp);
  if (o.output) {
    write_file(*o.output, csv.str());
  } else {
    out << csv.str();
  }
  return 0;
}

int do_analyze(const AnalyzeOptions& o, std::ostream& out) {
  if (!(o.gamma > 0.0 && o.gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  if (!(o.span > 0.0)) throw std::invalid_argument("span must be positive");
  if (o.n_max < 1) throw std::invalid_argument("n-max must be at least 1");

  struct Labelled {
    std::string label;
    ScheduleConfig schedule;
  };
  std::vector<Labelled> schedules;
  for (double theta : o.thetas) {
    ScheduleConfig sc;
    sc.algo = Algo::qdp;
    sc.theta = theta;
    char label[48];
    std::snprintf(label, sizeof label, "theta=%.10g", theta);
    schedules.push_back({label, resolve_schedule(sc, o.gamma)});
  }
  for (std::size_t m : o.constant_ms) {
    ScheduleConfig sc;
    sc.algo = Algo::qdp;
    sc.size_mode = SizeMode::constant;
    sc.constant_m = m;
    schedules.push_back({"m=" + std::to_string(m), resolve_schedule(sc, o.gamma)});
  }
  if (schedules.empty()) throw std::invalid_argument("no schedules to analyze");

  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& s : schedules) {
    lo = std::min(lo, qdp_time(s.schedule, 1));
    hi = std::max(hi, qdp_time(s.schedule, o.n_max));
  }
  const auto Ts = log_grid(lo, hi, o.points);

  std::ostringstream csv;
  csv << "T,n,e,schedule\n";
  for (const auto& s : schedules) {
    for (const auto& p : qdp_curve(o.gamma, o.span, s.schedule, Ts, o.n_max)) {
      csv << io::format_number(p.T) << ',' << p.n << ',' << io::format_number(p.e) << ',' << s.label << '\n';
    }
  }
  if (o.output) {
    write_file(*o.output, csv.str());
  } else {
    out << csv.str();
  }
  return 0;
}

}  // namespace

unsigned worker_threads() {
  unsigned n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DDP_THREADS"); env && *env) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (*end != '\0' || cap < 1) {
      throw std::invalid_argument(std::string("DDP_THREADS must be a positive integer, got '") + env + "'");
    }
    n = std::min<unsigned>(n, static_cast<unsigned>(std::min(cap, 4096L)));
  }
  return n;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributional dynamic programming for finite MDPs", "ddp"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check an MDP configuration");
  validate_cmd->add_option("config", validate_path, "MDP JSON file")->required();

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Iterate a projected distributional Bellman update");
  run_cmd->add_option("config", run.mdp_path, "MDP JSON file")->required();
  run_cmd->add_option("--run-config", run.run_config, "Run configuration JSON file");
  run_cmd->add_option("--algo", run.algo, "ppa, adp, qsp or qdp");
  run_cmd->add_option("--theta", run.theta, "Size growth base, M(k) = ceil((1/theta)^k)");
  run_cmd->add_option("--size-mode", run.size_mode, "exponential or constant");
  run_cmd->add_option("--constant-m", run.constant_m, "Support size in constant mode");
  run_cmd->add_option("--spline-fraction", run.spline_fraction, "QSP anchor fraction");
  run_cmd->add_option("--max-iterations", run.max_iterations, "Iteration budget (default 40)");
  run_cmd->add_option("--max-seconds", run.max_seconds, "Wall-time budget checked between iterations");
  run_cmd->add_option("--seed", run.seed, "Recorded seed");
  run_cmd->add_flag("--trace-metrics", run.trace_metrics, "Evaluate metrics after every iteration");
  run_cmd->add_flag("--track-projection-error", run.track_pe, "Record w1 projection error per iteration");
  add_truth_options(run_cmd, run.truth);
  add_output_options(run_cmd, run.output);

  McOptions mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo baseline of truncated returns");
  mc_cmd->add_option("config", mc.mdp_path, "MDP JSON file")->required();
  mc_cmd->add_option("--horizon", mc.horizon, "Trajectory length")->capture_default_str();
  mc_cmd->add_option("--samples", mc.samples, "Trajectories per state");
  mc_cmd->add_option("--particle-budget", mc.particle_budget, "Total particles shared by all states");
  mc_cmd->add_option("--max-seconds", mc.max_seconds, "Sample in rounds until this elapses");
  mc_cmd->add_option("--seed", mc.seed, "Generator seed")->capture_default_str();
  add_truth_options(mc_cmd, mc.truth);
  add_output_options(mc_cmd, mc.output);

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Metric table of a particle dump against a ground truth");
  cmp_cmd->add_option("config", cmp.mdp_path, "MDP JSON file")->required();
  cmp_cmd->add_option("--approx", cmp.approx_path, "Particle CSV (state,point,weight)")->required();
  add_truth_options(cmp_cmd, cmp.truth);
  cmp_cmd->add_option("--output", cmp.output, "Metric table CSV path");

  AnalyzeOptions an;
  auto* an_cmd = app.add_subcommand("analyze", "QDP error/time trade-off curves");
  an_cmd->add_option("--gamma", an.gamma, "Discount")->capture_default_str();
  an_cmd->add_option("--span", an.span, "v_max - v_min")->capture_default_str();
  an_cmd->add_option("--theta", an.thetas, "Exponential schedule bases")->delimiter(',')->capture_default_str();
  an_cmd->add_option("--constant-m", an.constant_ms, "Constant schedule sizes")->delimiter(',')->capture_default_str();
  an_cmd->add_option("--n-max", an.n_max, "Largest iteration count")->capture_default_str();
  an_cmd->add_option("--points", an.points, "Time grid size")->capture_default_str();
  an_cmd->add_option("--output", an.output, "Curve CSV path");

  std::vector<const char*> argv{"ddp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return usage_error;
  }

  try {
    if (validate_cmd->parsed()) return do_validate(validate_path, out);
    if (run_cmd->parsed()) return do_run(run, out);
    if (mc_cmd->parsed()) return do_mc(mc, out);
    if (cmp_cmd->parsed()) return do_compare(cmp, out);
    if (an_cmd->parsed()) return do_analyze(an, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return runtime_error;
  }
  return usage_error;
}

}  // namespace ddp::cli
