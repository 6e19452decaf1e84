#include "ddp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ddp::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double number_field(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw std::invalid_argument(where + ": missing \"" + key + "\"");
  }
  const Json& v = j.at(key);
  if (!v.is_number()) {
    throw std::invalid_argument(where + ": \"" + key + "\" must be a number");
  }
  return v.get<double>();
}

std::vector<double> number_array(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw std::invalid_argument(where + ": \"" + key + "\" must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) {
      throw std::invalid_argument(where + ": \"" + key + "\" must be an array of numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

const Json& array_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw std::invalid_argument(std::string("MDP config: \"") + key + "\" must be an array");
  }
  return j.at(key);
}

std::vector<std::string> label_list(const Json& j, const char* key) {
  std::vector<std::string> out;
  for (const auto& v : array_field(j, key)) {
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else if (v.is_number_integer()) {
      out.push_back(std::to_string(v.get<long long>()));
    } else {
      throw std::invalid_argument(std::string("MDP config: \"") + key + "\" entries must be strings");
    }
  }
  return out;
}

std::vector<double> row_of_numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) {
    throw std::invalid_argument(where + " must be an array");
  }
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw std::invalid_argument(where + " must contain numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

OrderedJson number_json(double v) {
  if (std::isfinite(v)) {
    return v;
  }
  return format_number(v);
}

OrderedJson extended_json(const ExtendedValue& v) {
  OrderedJson j = number_json(v.value);
  if (!v.note.empty()) {
    return OrderedJson{{"value", j}, {"note", v.note}};
  }
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_double(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument(where + ": not a number: '" + text + "'");
  }
  return v;
}

double seconds(double v, const EmitOptions& opts) { return opts.zero_timing ? 0.0 : v; }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Distribution parse_distribution(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw std::invalid_argument("distribution descriptor needs a string \"type\"");
  }
  const auto type = j.at("type").get<std::string>();
  const std::string where = "distribution '" + type + "'";
  if (type == "dirac") return Distribution::dirac(number_field(j, "point", where));
  if (type == "normal") return Distribution::normal(number_field(j, "mu", where), number_field(j, "sigma2", where));
  if (type == "cauchy") return Distribution::cauchy(number_field(j, "mu", where), number_field(j, "scale", where));
  if (type == "uniform") return Distribution::uniform(number_field(j, "a", where), number_field(j, "b", where));
  if (type == "exponential") return Distribution::exponential(number_field(j, "rate", where));
  if (type == "finite") {
    const auto points = number_array(j, "points", where);
    const auto weights = number_array(j, "weights", where);
    return Distribution::finite(FiniteDist::from_particles(points, weights));
  }
  throw std::invalid_argument("unknown distribution type '" + type + "'");
}

Json to_json(const Distribution& dist) {
  return std::visit(overloaded{
                        [](const Dirac& d) { return Json{{"type", "dirac"}, {"point", d.point}}; },
                        [](const FiniteDist& f) {
                          return Json{{"type", "finite"}, {"points", f.points()}, {"weights", f.weights()}};
                        },
                        [](const Normal& n) { return Json{{"type", "normal"}, {"mu", n.mu}, {"sigma2", n.sigma2}}; },
                        [](const Cauchy& c) { return Json{{"type", "cauchy"}, {"mu", c.mu}, {"scale", c.scale}}; },
                        [](const Uniform& u) { return Json{{"type", "uniform"}, {"a", u.a}, {"b", u.b}}; },
                        [](const Exponential& e) { return Json{{"type", "exponential"}, {"rate", e.rate}}; },
                    },
                    dist.variant());
}

MdpSpec mdp_from_json(const Json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("MDP config must be a JSON object");
  }
  MdpSpec mdp;
  mdp.states = label_list(j, "states");
  mdp.actions = label_list(j, "actions");
  if (!j.contains("gamma") || !j.at("gamma").is_number()) {
    throw std::invalid_argument("MDP config: \"gamma\" must be a number");
  }
  mdp.gamma = j.at("gamma").get<double>();

  for (std::size_t s = 0; const auto& row : array_field(j, "policy")) {
    mdp.policy.push_back(row_of_numbers(row, "policy[" + std::to_string(s++) + "]"));
  }
  for (std::size_t s = 0; const auto& by_action : array_field(j, "transition")) {
    if (!by_action.is_array()) {
      throw std::invalid_argument("transition[" + std::to_string(s) + "] must be an array");
    }
    auto& slot = mdp.transition.emplace_back();
    for (std::size_t a = 0; const auto& row : by_action) {
      slot.push_back(row_of_numbers(row, "transition[" + std::to_string(s) + "][" + std::to_string(a++) + "]"));
    }
    ++s;
  }
  for (std::size_t s = 0; const auto& by_action : array_field(j, "rewards")) {
    if (!by_action.is_array()) {
      throw std::invalid_argument("rewards[" + std::to_string(s) + "] must be an array");
    }
    auto& per_state = mdp.rewards.emplace_back();
    for (std::size_t a = 0; const auto& row : by_action) {
      if (!row.is_array()) {
        throw std::invalid_argument("rewards[" + std::to_string(s) + "][" + std::to_string(a) + "] must be an array");
      }
      auto& per_action = per_state.emplace_back();
      for (std::size_t t = 0; const auto& desc : row) {
        try {
          per_action.push_back(parse_distribution(desc));
        } catch (const std::invalid_argument& e) {
          throw std::invalid_argument("rewards[" + std::to_string(s) + "][" + std::to_string(a) + "][" +
                                      std::to_string(t) + "]: " + e.what());
        }
        ++t;
      }
      ++a;
    }
    ++s;
  }
  return mdp;
}

Json to_json(const MdpSpec& mdp) {
  Json rewards = Json::array();
  for (const auto& by_action : mdp.rewards) {
    Json a_rows = Json::array();
    for (const auto& row : by_action) {
      Json descs = Json::array();
      for (const auto& d : row) descs.push_back(to_json(d));
      a_rows.push_back(std::move(descs));
    }
    rewards.push_back(std::move(a_rows));
  }
  return Json{{"states", mdp.states},         {"actions", mdp.actions},
              {"gamma", mdp.gamma},           {"policy", mdp.policy},
              {"transition", mdp.transition}, {"rewards", std::move(rewards)}};
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

MdpSpec load_mdp(const std::filesystem::path& path) { return mdp_from_json(read_json(path)); }

std::vector<Distribution> parse_ground_truth(const Json& j) {
  const Json& list = j.is_object() && j.contains("ground_truth") ? j.at("ground_truth") : j;
  if (!list.is_array()) {
    throw std::invalid_argument("ground truth must be an array of distribution descriptors");
  }
  std::vector<Distribution> out;
  for (const auto& d : list) out.push_back(parse_distribution(d));
  return out;
}

RunFile parse_run_file(const Json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("run config must be a JSON object");
  }
  RunFile rf;
  auto& sc = rf.schedule;
  for (const auto& [key, v] : j.items()) {
    const std::string where = "run config \"" + key + "\"";
    auto need_number = [&] {
      if (!v.is_number()) throw std::invalid_argument(where + " must be a number");
      return v.get<double>();
    };
    auto need_count = [&] {
      if (!v.is_number_unsigned()) throw std::invalid_argument(where + " must be a nonnegative integer");
      return v.get<std::uint64_t>();
    };
    if (key == "algo") {
      sc.algo = parse_algo(v.get<std::string>());
    } else if (key == "theta") {
      sc.theta = need_number();
    } else if (key == "size_mode") {
      const auto mode = v.get<std::string>();
      if (mode == "exponential") {
        sc.size_mode = SizeMode::exponential;
      } else if (mode == "constant") {
        sc.size_mode = SizeMode::constant;
      } else {
        throw std::invalid_argument(where + ": unknown size mode '" + mode + "'");
      }
    } else if (key == "constant_m") {
      sc.constant_m = need_count();
    } else if (key == "spline_fraction") {
      sc.spline_fraction = need_number();
    } else if (key == "ppa_w0") {
      sc.ppa_w0 = need_number();
    } else if (key == "ppa_growth") {
      sc.ppa_growth = need_number();
    } else if (key == "ppa_z") {
      sc.ppa_z = need_number();
    } else if (key == "max_iterations") {
      rf.max_iterations = need_count();
    } else if (key == "max_seconds") {
      rf.max_seconds = need_number();
    } else if (key == "seed") {
      rf.seed = need_count();
    } else if (key == "metrics") {
      if (v.is_string()) {
        rf.metrics = parse_metric_list(v.get<std::string>());
      } else if (v.is_array()) {
        std::vector<MetricSpec> ms;
        for (const auto& name : v) ms.push_back(MetricSpec::parse(name.get<std::string>()));
        rf.metrics = std::move(ms);
      } else {
        throw std::invalid_argument(where + " must be a string or an array of strings");
      }
    } else if (key == "ground_truth") {
      rf.ground_truth = parse_ground_truth(v);
    } else if (key == "initial") {
      ReturnApprox init;
      for (const auto& d : parse_ground_truth(v)) {
        if (d.kind() == DistKind::dirac) {
          init.push_back(FiniteDist::point_mass(std::get<Dirac>(d.variant()).point));
        } else if (d.kind() == DistKind::finite) {
          init.push_back(std::get<FiniteDist>(d.variant()));
        } else {
          throw std::invalid_argument(where + ": initial laws must be dirac or finite");
        }
      }
      rf.initial = std::move(init);
    } else {
      throw std::invalid_argument("run config: unknown key \"" + key + "\"");
    }
  }
  return rf;
}

ReturnApprox read_particles_csv(const std::filesystem::path& path, const MdpSpec& mdp) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"state", "point", "weight"}) {
    throw std::invalid_argument(path.string() + ": expected header state,point,weight");
  }
  std::vector<std::vector<double>> points(mdp.num_states());
  std::vector<std::vector<double>> weights(mdp.num_states());
  for (std::size_t row = 2; std::getline(in, line); ++row) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(row);
    if (f.size() != 3) {
      throw std::invalid_argument(where + ": expected 3 fields");
    }
    const std::size_t s = mdp.state_index(f[0]);
    points[s].push_back(parse_double(f[1], where));
    weights[s].push_back(parse_double(f[2], where));
  }
  ReturnApprox eta;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    if (points[s].empty()) {
      throw std::invalid_argument(path.string() + ": no particles for state '" + mdp.states[s] + "'");
    }
    eta.push_back(FiniteDist::from_particles(points[s], weights[s]));
  }
  return eta;
}

OrderedJson report_json(const RunReport& report, const MdpSpec& mdp, const EmitOptions& opts) {
  OrderedJson j;
  j["algorithm"] = report.algorithm;
  j["seed"] = report.seed;
  j["gamma"] = mdp.gamma;
  j["states"] = mdp.states;
  j["seconds"] = seconds(report.seconds, opts);

  OrderedJson iters = OrderedJson::array();
  for (const auto& rec : report.iterations) {
    OrderedJson r;
    r["k"] = rec.k;
    r["seconds"] = seconds(rec.seconds, opts);
    r["total_particles"] = rec.total_particles;
    OrderedJson states = OrderedJson::array();
    for (const auto& st : rec.states) {
      states.push_back(OrderedJson{{"m", st.m}, {"x_min", number_json(st.x_min)}, {"x_max", number_json(st.x_max)}});
    }
    r["states"] = std::move(states);
    if (!rec.metrics.empty()) {
      OrderedJson ms = OrderedJson::array();
      for (const auto& v : rec.metrics) ms.push_back(extended_json(v));
      r["metrics"] = std::move(ms);
    }
    if (rec.projection_error) {
      r["projection_error"] = number_json(*rec.projection_error);
    }
    iters.push_back(std::move(r));
  }
  j["iterations"] = std::move(iters);

  OrderedJson metrics = OrderedJson::object();
  for (const auto& m : report.metrics) {
    OrderedJson per_state = OrderedJson::array();
    for (const auto& v : m.per_state) per_state.push_back(extended_json(v));
    metrics[m.name] = OrderedJson{{"max", extended_json(m.value)}, {"per_state", std::move(per_state)}};
  }
  j["metrics"] = std::move(metrics);

  OrderedJson final_laws = OrderedJson::array();
  for (std::size_t s = 0; s < report.final.size(); ++s) {
    const auto& f = report.final[s];
    final_laws.push_back(
        OrderedJson{{"state", mdp.states.at(s)}, {"points", f.points()}, {"weights", f.weights()}});
  }
  j["final"] = std::move(final_laws);
  return j;
}

void write_iterations_csv(std::ostream& os, const RunReport& report, const std::vector<MetricSpec>& traced,
                          const EmitOptions& opts) {
  const bool with_pe = !report.iterations.empty() && report.iterations.front().projection_error.has_value();
  const bool with_metrics = !report.iterations.empty() && !report.iterations.front().metrics.empty();
  os << "k,seconds,total_particles";
  if (with_metrics) {
    for (const auto& m : traced) os << ',' << csv_field(m.name());
  }
  if (with_pe) os << ",projection_error";
  os << '\n';
  for (const auto& rec : report.iterations) {
    os << rec.k << ',' << format_number(seconds(rec.seconds, opts)) << ',' << rec.total_particles;
    if (with_metrics) {
      for (const auto& v : rec.metrics) os << ',' << format_number(v.value);
    }
    if (with_pe) os << ',' << format_number(rec.projection_error.value_or(std::numeric_limits<double>::quiet_NaN()));
    os << '\n';
  }
}

void write_particles_csv(std::ostream& os, const ReturnApprox& eta, const MdpSpec& mdp) {
  os << "state,point,weight\n";
  for (std::size_t s = 0; s < eta.size(); ++s) {
    const std::string label = csv_field(mdp.states.at(s));
    const auto& f = eta[s];
    for (std::size_t i = 0; i < f.size(); ++i) {
      os << label << ',' << format_number(f.points()[i]) << ',' << format_number(f.weights()[i]) << '\n';
    }
  }
}

void write_metric_table_csv(std::ostream& os, const std::vector<MetricResult>& table, const MdpSpec& mdp) {
  os << "metric,value";
  for (const auto& label : mdp.states) os << ',' << csv_field(label);
  os << '\n';
  for (const auto& row : table) {
    os << csv_field(row.name) << ',' << format_number(row.value.value);
    for (const auto& v : row.per_state) os << ',' << format_number(v.value);
    os << '\n';
  }
}

}  // namespace ddp::io
