#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "wis/birth_death.hpp"
#include "wis/correlations.hpp"
#include "wis/error.hpp"
#include "wis/exact.hpp"
#include "wis/montecarlo.hpp"

namespace wis::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::unsupported:
    case ErrorKind::instance_too_large:
      return kUnsupported;
    case ErrorKind::numerical_failure:
    case ErrorKind::degenerate_fitness:
      return kNumericalFailure;
    default:
      return kInvalidConfig;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_parameter, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::invalid_parameter, "bad " + what + " \"" + text + "\"");
}

// Options every subcommand shares.
struct Common {
  std::uint64_t seed = 1;
  bool deterministic = false;
  unsigned threads = std::max(1U, std::thread::hardware_concurrency());
  std::string out_path;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--seed", common.seed, "Master seed");
  sub->add_flag("--deterministic", common.deterministic, "Reproducible output (requires --seed, no timestamp)");
  sub->add_option("--threads", common.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", common.out_path, "Write output here instead of stdout");
}

struct ParamOptions {
  std::string rule = "wis";
  double b = 0.1;
  double c = 0.05;
  double epsilon = 0.0;
};

void add_params(CLI::App* sub, ParamOptions& p) {
  sub->add_option("--rule", p.rule, "vm | pd | wis | nowak")->capture_default_str();
  sub->add_option("--b", p.b, "Benefit")->capture_default_str();
  sub->add_option("--c", p.c, "Cost")->capture_default_str();
  sub->add_option("--epsilon", p.epsilon, "Selector probability")->capture_default_str();
}

Params to_params(const ParamOptions& p) {
  Params params;
  params.rule = parse_rule(p.rule);
  params.b = p.b;
  params.c = p.c;
  params.epsilon = p.epsilon;
  return params;
}

void params_json(ordered_json& j, const ParamOptions& p) {
  j["rule"] = p.rule;
  j["b"] = p.b;
  j["c"] = p.c;
  j["epsilon"] = p.epsilon;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

InitPolicy parse_init(const std::string& text) {
  if (text == "pair") return InitPolicy::random_adjacent_pair();
  if (text == "uniform") return InitPolicy::random_uniform();
  if (text.rfind("bits:", 0) == 0) return InitPolicy::fixed(Configuration::from_string(text.substr(5)));
  throw Error(ErrorKind::invalid_parameter, "init must be pair, uniform or bits:0101...");
}

std::string girth_text(const Graph& g) { return g.girth() ? std::to_string(*g.girth()) : "inf"; }

// Splices keys from a JSON config file into the argument list; flags given
// on the command line win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw Error(ErrorKind::invalid_parameter, "--config needs a path");
  const std::string path = *(it + 1);
  args.erase(it, it + 2);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_parameter, std::string("config file: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::invalid_parameter, "config file must hold a JSON object");
  auto scalar = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return num(v.get<double>());
    throw Error(ErrorKind::invalid_parameter, "unsupported config value " + v.dump());
  };
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      args.push_back(flag);
      for (const auto& item : value) args.push_back(scalar(item));
    } else {
      args.push_back(flag);
      args.push_back(scalar(value));
    }
  }
  return args;
}

class Emitter {
 public:
  Emitter(const std::string& command, const Common& common, ordered_json config, std::ostream& out)
      : common_(common), out_(out) {
    config["seed"] = common.seed;
    config["deterministic"] = common.deterministic;
    if (!common.deterministic) {
      const auto now = std::chrono::system_clock::now().time_since_epoch();
      config["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
    }
    header_ = "# wis " + command + " " + config.dump() + "\n";
  }

  void write(const std::string& body) const {
    if (common_.out_path.empty()) {
      out_ << header_ << body;
      return;
    }
    std::ofstream file(common_.out_path, std::ios::binary);
    if (!file) throw Error(ErrorKind::invalid_parameter, "cannot write " + common_.out_path);
    file << header_ << body;
  }

  /// Extra files (summaries) get the same header.
  void write_file(const std::string& path, const std::string& body) const {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::invalid_parameter, "cannot write " + path);
    file << header_ << body;
  }

 private:
  const Common& common_;
  std::ostream& out_;
  std::string header_;
};

// ---------------------------------------------------------------- graph

struct GraphCommand {
  std::string named;
  int cycle = 0;
  int complete = 0;
  int bipartite = 0;
  std::vector<int> random_regular;
  int girth = 0;
  std::string file;
  std::string spec;
  std::string edges_out;
};

void run_graph(const GraphCommand& cmd, const Common& common, std::ostream& out) {
  int sources = !cmd.named.empty() + (cmd.cycle > 0) + (cmd.complete > 0) + (cmd.bipartite > 0) +
                !cmd.random_regular.empty() + !cmd.file.empty() + !cmd.spec.empty();
  if (sources != 1) throw Error(ErrorKind::invalid_parameter, "give exactly one graph source");
  std::string label;
  std::optional<Graph> g;
  if (!cmd.named.empty()) {
    g = builtin_named(cmd.named);
    label = cmd.named;
  } else if (cmd.cycle > 0) {
    g = build_cycle(cmd.cycle);
    label = fmt::format("cycle:{}", cmd.cycle);
  } else if (cmd.complete > 0) {
    g = build_complete(cmd.complete);
    label = fmt::format("complete:{}", cmd.complete);
  } else if (cmd.bipartite > 0) {
    g = build_complete_bipartite(cmd.bipartite);
    label = fmt::format("bipartite:{}", cmd.bipartite);
  } else if (!cmd.random_regular.empty()) {
    if (cmd.random_regular.size() != 2) throw Error(ErrorKind::invalid_parameter, "--random-regular needs N K");
    RandomRegularOptions opts;
    opts.seed = common.seed;
    if (cmd.girth > 0) opts.require_girth = cmd.girth;
    g = build_random_regular(cmd.random_regular[0], cmd.random_regular[1], opts);
    label = fmt::format("random:{}:{}{}", cmd.random_regular[0], cmd.random_regular[1],
                        cmd.girth > 0 ? fmt::format(":{}", cmd.girth) : "");
  } else if (!cmd.file.empty()) {
    g = load_graph(read_file(cmd.file));
    label = "file:" + cmd.file;
  } else {
    g = resolve_graph(cmd.spec, common.seed);
    label = cmd.spec;
  }
  ordered_json config;
  config["graph"] = label;
  Emitter emit("graph", common, config, out);
  emit.write(fmt::format("graph,n,k,girth,edges\n{},{},{},{},{}\n", label, g->n(), g->k(), girth_text(*g),
                         g->edge_count()));
  if (!cmd.edges_out.empty()) {
    const bool json = cmd.edges_out.size() >= 5 && cmd.edges_out.substr(cmd.edges_out.size() - 5) == ".json";
    std::ofstream file(cmd.edges_out, std::ios::binary);
    if (!file) throw Error(ErrorKind::invalid_parameter, "cannot write " + cmd.edges_out);
    file << (json ? save_graph_json(*g) + "\n" : save_edge_list(*g));
  }
}

// ------------------------------------------------------------- simulate

struct SimulateCommand {
  std::string graph;
  std::uint64_t graph_seed = 1;
  ParamOptions params;
  std::uint64_t trials = 10000;
  std::uint64_t max_steps = 0;
  std::string init = "pair";
  std::vector<std::uint64_t> trace;
};

std::string fixation_header() {
  return "graph,n,k,rule,b,c,epsilon,trials,pi_hat,ci95,mean_steps,capped_fraction,seed\n";
}

std::string fixation_row(const std::string& label, const Graph& g, const ParamOptions& p,
                         const FixationEstimate& est, std::uint64_t seed) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", label, g.n(), g.k(), p.rule, num(p.b), num(p.c),
                     num(p.epsilon), est.trials, num(est.pi_hat), num(est.ci95_halfwidth),
                     num(est.mean_absorption_steps), num(est.capped_fraction), seed);
}

void run_simulate(const SimulateCommand& cmd, const Common& common, std::ostream& out) {
  const Graph g = resolve_graph(cmd.graph, cmd.graph_seed);
  const Params params = to_params(cmd.params);
  const InitPolicy init = parse_init(cmd.init);
  RunOptions run;
  run.trials = cmd.trials;
  run.max_steps = cmd.max_steps ? cmd.max_steps : default_max_steps(g);
  run.seed = common.seed;
  run.threads = common.threads;

  ordered_json config;
  config["graph"] = cmd.graph;
  config["graph_seed"] = cmd.graph_seed;
  params_json(config, cmd.params);
  config["trials"] = cmd.trials;
  config["max_steps"] = run.max_steps;
  config["init"] = init.describe();
  if (!cmd.trace.empty()) config["trace"] = cmd.trace;
  Emitter emit("simulate", common, config, out);

  if (!cmd.trace.empty()) {
    if (cmd.trace.size() != 2) throw Error(ErrorKind::invalid_parameter, "--trace needs HORIZON STRIDE");
    const auto points = expected_cooperators_trace(g, init, params, cmd.trace[0], cmd.trace[1], run);
    std::string body = "t,mean_cooperators,stderr\n";
    for (const auto& p : points) body += fmt::format("{},{},{}\n", p.t, num(p.mean), num(p.stderr_));
    emit.write(body);
    return;
  }
  const auto est = estimate_fixation(g, init, params, run);
  emit.write(fixation_header() + fixation_row(cmd.graph, g, cmd.params, est, common.seed));
}

// ---------------------------------------------------------------- exact

struct ExactCommand {
  bool absorb = false;
  std::string graph;
  std::uint64_t graph_seed = 1;
  ParamOptions params;
  int size_cap = kDefaultAbsorptionCap;
  std::vector<double> drift_complete;
  std::vector<double> drift_bipartite;
  std::string bd_hitting;
  std::string bd_stationary;
  int lump = 0;
};

void run_exact(const ExactCommand& cmd, const Common& common, std::ostream& out) {
  const int modes = cmd.absorb + !cmd.drift_complete.empty() + !cmd.drift_bipartite.empty() +
                    !cmd.bd_hitting.empty() + !cmd.bd_stationary.empty() + (cmd.lump > 0);
  if (modes != 1) throw Error(ErrorKind::invalid_parameter, "choose exactly one exact-analysis mode");
  ordered_json config;
  auto as_int = [](double v, const char* what) {
    if (v != std::floor(v)) throw Error(ErrorKind::invalid_parameter, std::string(what) + " must be an integer");
    return static_cast<int>(v);
  };

  if (cmd.absorb) {
    if (cmd.graph.empty()) throw Error(ErrorKind::invalid_parameter, "--absorb needs --graph");
    const Graph g = resolve_graph(cmd.graph, cmd.graph_seed);
    config["mode"] = "absorb";
    config["graph"] = cmd.graph;
    params_json(config, cmd.params);
    config["size_cap"] = cmd.size_cap;
    const auto result = absorption_probabilities(g, to_params(cmd.params), cmd.size_cap);
    Emitter("exact", common, config, out).write(absorption_csv(result));
    return;
  }
  if (!cmd.drift_complete.empty()) {
    if (cmd.drift_complete.size() != 4) throw Error(ErrorKind::invalid_parameter, "--drift-complete needs N Y B C");
    const int n = as_int(cmd.drift_complete[0], "N");
    const int y = as_int(cmd.drift_complete[1], "Y");
    const double b = cmd.drift_complete[2];
    const double c = cmd.drift_complete[3];
    config["mode"] = "drift_complete";
    config["args"] = cmd.drift_complete;
    Emitter("exact", common, config, out)
        .write(fmt::format("n,y,b,c,drift\n{},{},{},{},{}\n", n, y, num(b), num(c), num(drift_complete(n, y, b, c))));
    return;
  }
  if (!cmd.drift_bipartite.empty()) {
    if (cmd.drift_bipartite.size() != 5) {
      throw Error(ErrorKind::invalid_parameter, "--drift-bipartite needs N Y1 Y2 B C");
    }
    const int n = as_int(cmd.drift_bipartite[0], "N");
    const int y1 = as_int(cmd.drift_bipartite[1], "Y1");
    const int y2 = as_int(cmd.drift_bipartite[2], "Y2");
    const double b = cmd.drift_bipartite[3];
    const double c = cmd.drift_bipartite[4];
    config["mode"] = "drift_bipartite";
    config["args"] = cmd.drift_bipartite;
    Emitter("exact", common, config, out)
        .write(fmt::format("n,y1,y2,b,c,drift\n{},{},{},{},{},{}\n", n, y1, y2, num(b), num(c),
                           num(drift_bipartite(n, y1, y2, b, c))));
    return;
  }
  if (!cmd.bd_hitting.empty() || !cmd.bd_stationary.empty()) {
    const bool hitting = !cmd.bd_hitting.empty();
    const std::string& path = hitting ? cmd.bd_hitting : cmd.bd_stationary;
    const auto chain = read_chain_csv(read_file(path));
    config["mode"] = hitting ? "bd_hitting" : "bd_stationary";
    config["chain"] = path;
    std::string body;
    if (hitting) {
      const auto times = bd_hitting_times(chain);
      body = "from,to,expected_steps\n";
      for (int a = 0; a <= chain.size(); ++a) {
        for (int b = 0; b <= chain.size(); ++b) body += fmt::format("{},{},{}\n", a, b, num(times.at(a, b)));
      }
    } else {
      const auto pi = bd_stationary(chain);
      body = "state,pi\n";
      for (std::size_t j = 0; j < pi.size(); ++j) body += fmt::format("{},{}\n", j, num(pi[j]));
    }
    Emitter("exact", common, config, out).write(body);
    return;
  }
  config["mode"] = "lump";
  config["n"] = cmd.lump;
  params_json(config, cmd.params);
  Emitter("exact", common, config, out).write(write_chain_csv(lump_complete_graph_chain(cmd.lump, to_params(cmd.params))));
}

// ----------------------------------------------------------------- corr

struct CorrCommand {
  std::string graph = "mcgee";
  std::uint64_t graph_seed = 1;
  double b = 0.25;
  double c = 0.02;
  double gamma = 3.0;
  bool no_truncate = false;
  std::uint64_t max_steps = 0;
  std::uint64_t stride = 1;
  std::string summary_path;
  std::string format = "csv";
};

bool claim_applies(int k, double b, double c) {
  const double threshold = static_cast<double>(k) * k / (k - 1.0) * c;
  return b - threshold >= -1e-12 * std::max({b, threshold, 1e-300});
}

ordered_json corr_summary(const Graph& g, const std::string& label, const CorrCommand& cmd, const DriftSeries& series,
                          const TheoremParams& theorem) {
  ordered_json s;
  s["graph"] = label;
  s["n"] = g.n();
  s["k"] = g.k();
  s["b"] = cmd.b;
  s["c"] = cmd.c;
  s["gamma"] = cmd.gamma;
  s["t_star"] = theorem.t_star_horizon();
  s["steps"] = series.steps;
  s["steps_evaluated"] = series.drifts.size();
  s["truncated"] = series.truncated;
  s["cumulative_drift"] = series.cumulative_sum;
  s["delta"] = series.running_mean;
  s["epsilon_theorem"] = theorem.epsilon_theorem();
  s["q4_closure"] = "exact_field";
  s["monotonicity"] = series.monotone ? "PASS" : "FAIL";

  const bool applies = claim_applies(g.k(), cmd.b, cmd.c);
  if (applies) {
    const bool in_range = std::all_of(series.drifts.begin(), series.drifts.end(),
                                      [](double d) { return d >= -1e-14 && d <= 1.0; });
    s["claim1"] = in_range ? "PASS" : "FAIL";
    const double bound = lemma2_lower_bound(g.k(), cmd.b, cmd.c);
    s["lemma2_bound"] = bound;
    s["lemma2"] = series.cumulative_sum >= bound ? "PASS" : "FAIL";
    s["f"] = theorem_f(g.k(), cmd.b, cmd.c, g.n(), cmd.gamma);
  } else {
    s["claim1"] = "NOT-APPLICABLE";
    s["lemma2_bound"] = nullptr;
    s["lemma2"] = "NOT-APPLICABLE";
    s["f"] = nullptr;
  }
  const auto& q0 = series.q.front();
  const Eigen::Vector4d q_start(q0[0], q0[1], q0[2], q0[3]);
  s["b_path_bound_corner_2_over_nk"] =
      b_path_bound(q_start, g.k(), cmd.b, cmd.c, g.n(), series.steps, Corner::one_minus_2_over_nk);
  s["b_path_bound_corner_2_over_n"] =
      b_path_bound(q_start, g.k(), cmd.b, cmd.c, g.n(), series.steps, Corner::one_minus_2_over_n);
  return s;
}

void run_corr(const CorrCommand& cmd, const Common& common, std::ostream& out) {
  const Graph g = resolve_graph(cmd.graph, cmd.graph_seed);
  if (cmd.format != "csv" && cmd.format != "json") throw Error(ErrorKind::invalid_parameter, "format is csv or json");
  TheoremParams theorem{g.n(), g.k(), cmd.gamma};
  DriftSeriesOptions options;
  options.truncate = !cmd.no_truncate;
  if (cmd.max_steps) options.max_steps = cmd.max_steps;
  const auto series = drift_series(g, cmd.b, cmd.c, theorem, options);

  ordered_json config;
  config["graph"] = cmd.graph;
  config["graph_seed"] = cmd.graph_seed;
  config["b"] = cmd.b;
  config["c"] = cmd.c;
  config["gamma"] = cmd.gamma;
  config["truncate"] = options.truncate;
  config["max_steps"] = cmd.max_steps;
  config["stride"] = cmd.stride;
  Emitter emit("corr", common, config, out);
  const std::string summary = corr_summary(g, cmd.graph, cmd, series, theorem).dump(2) + "\n";
  if (!cmd.summary_path.empty()) emit.write_file(cmd.summary_path, summary);
  if (cmd.format == "json") {
    emit.write(summary);
    return;
  }
  std::string body = "t,q0,q1,q2,q3,q4,drift,cumulative_drift\n";
  const std::uint64_t stride = std::max<std::uint64_t>(1, cmd.stride);
  for (std::size_t t = 0; t < series.drifts.size(); ++t) {
    if (t % stride != 0 && t + 1 != series.drifts.size()) continue;
    const auto& q = series.q[t];
    body += fmt::format("{},{},{},{},{},{},{},{}\n", t, num(q[0]), num(q[1]), num(q[2]), num(q[3]), num(q[4]),
                        num(series.drifts[t]), num(series.cumulative[t]));
  }
  emit.write(body);
}

// ---------------------------------------------------------------- sweep

struct SweepCommand {
  std::string mode = "corr";
  std::vector<std::string> graphs;
  std::string family;
  std::vector<int> sizes;
  std::vector<double> ratios;
  std::vector<double> bs;
  double c = 0.02;
  std::vector<double> epsilons;
  std::string rule = "wis";
  double gamma = 3.0;
  std::uint64_t max_steps = 0;
  std::uint64_t trials = 10000;
  std::uint64_t graph_seed = 1;
};

void run_sweep(const SweepCommand& cmd, const Common& common, std::ostream& out) {
  if (cmd.mode != "corr" && cmd.mode != "exact" && cmd.mode != "mc") {
    throw Error(ErrorKind::invalid_parameter, "mode is corr, exact or mc");
  }
  std::vector<std::string> labels = cmd.graphs;
  if (!cmd.family.empty()) {
    for (int n : cmd.sizes) labels.push_back(cmd.family + ":" + std::to_string(n));
  }
  std::vector<double> bs = cmd.bs;
  for (double r : cmd.ratios) bs.push_back(r * cmd.c);
  std::vector<double> epsilons = cmd.epsilons;
  if (cmd.mode == "corr") epsilons = {0.0};
  if (labels.empty() || bs.empty() || epsilons.empty()) {
    throw Error(ErrorKind::invalid_parameter, "sweep grid is empty (need graphs, b or ratio values, and epsilons)");
  }

  ordered_json config;
  config["mode"] = cmd.mode;
  config["graphs"] = labels;
  config["b"] = bs;
  config["c"] = cmd.c;
  config["epsilon"] = epsilons;
  config["rule"] = cmd.rule;
  config["gamma"] = cmd.gamma;
  config["max_steps"] = cmd.max_steps;
  config["trials"] = cmd.trials;
  config["graph_seed"] = cmd.graph_seed;
  Emitter emit("sweep", common, config, out);

  std::string body;
  if (cmd.mode == "corr") {
    body = "graph,n,k,b,c,ratio,cumulative_drift,lemma2_bound\n";
  } else if (cmd.mode == "exact") {
    body = "graph,n,k,rule,b,c,epsilon,pi_adjacent_pair\n";
  } else {
    body = fixation_header();
  }
  for (const auto& label : labels) {
    const Graph g = resolve_graph(label, cmd.graph_seed);
    for (double b : bs) {
      for (double eps : epsilons) {
        if (cmd.mode == "corr") {
          DriftSeriesOptions options;
          options.keep_q = false;
          if (cmd.max_steps) options.max_steps = cmd.max_steps;
          const auto series = drift_series(g, b, cmd.c, TheoremParams{g.n(), g.k(), cmd.gamma}, options);
          const std::string bound =
              claim_applies(g.k(), b, cmd.c) ? num(lemma2_lower_bound(g.k(), b, cmd.c)) : std::string("NA");
          body += fmt::format("{},{},{},{},{},{},{},{}\n", label, g.n(), g.k(), num(b), num(cmd.c),
                              num(cmd.c > 0 ? b / cmd.c : INFINITY), num(series.cumulative_sum), bound);
          continue;
        }
        ParamOptions p{cmd.rule, b, cmd.c, eps};
        if (cmd.mode == "exact") {
          const auto result = absorption_probabilities(g, to_params(p));
          body += fmt::format("{},{},{},{},{},{},{},{}\n", label, g.n(), g.k(), cmd.rule, num(b), num(cmd.c), num(eps),
                              num(adjacent_pair_fixation(g, result)));
        } else {
          RunOptions run;
          run.trials = cmd.trials;
          run.max_steps = cmd.max_steps ? cmd.max_steps : default_max_steps(g);
          run.seed = common.seed;
          run.threads = common.threads;
          const auto est = estimate_fixation(g, InitPolicy::random_adjacent_pair(), to_params(p), run);
          body += fixation_row(label, g, p, est, common.seed);
        }
      }
    }
  }
  emit.write(body);
}

}  // namespace

Graph resolve_graph(const std::string& spec, std::uint64_t graph_seed) {
  if (spec.empty()) throw Error(ErrorKind::invalid_parameter, "empty graph spec");
  for (const auto& name : builtin_names()) {
    if (spec == name) return builtin_named(spec);
  }
  if (spec.rfind("file:", 0) == 0) return load_graph(read_file(spec.substr(5)));
  const auto parts = split(spec, ':');
  const std::string& kind = parts[0];
  if (parts.size() == 2 && kind == "complete") return build_complete(parse_int(parts[1], "size"));
  if (parts.size() == 2 && kind == "cycle") return build_cycle(parse_int(parts[1], "size"));
  if (parts.size() == 2 && kind == "bipartite") return build_complete_bipartite(parse_int(parts[1], "size"));
  if ((parts.size() == 3 || parts.size() == 4) && kind == "random") {
    RandomRegularOptions opts;
    opts.seed = graph_seed;
    if (parts.size() == 4) opts.require_girth = parse_int(parts[3], "girth");
    return build_random_regular(parse_int(parts[1], "size"), parse_int(parts[2], "degree"), opts);
  }
  if (parts.size() == 1 && spec.size() > 1 && (spec[0] == 'k' || spec[0] == 'K')) {
    const auto sides = split(spec.substr(1), ',');
    if (sides.size() == 1) return build_complete(parse_int(sides[0], "size"));
    if (sides.size() == 2 && sides[0] == sides[1]) return build_complete_bipartite(2 * parse_int(sides[0], "size"));
  }
  throw Error(ErrorKind::invalid_parameter, "unknown graph spec \"" + spec + "\"");
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weak-imitation-of-success dynamics on regular graphs", "wis"};
  app.require_subcommand(1);

  Common common;
  GraphCommand graph_cmd;
  auto* graph = app.add_subcommand("graph", "Build or load a graph and report n, k, girth, edges");
  graph->add_option("--named", graph_cmd.named, "petersen | heawood | mcgee | tutte_coxeter");
  graph->add_option("--cycle", graph_cmd.cycle, "Cycle C_N");
  graph->add_option("--complete", graph_cmd.complete, "Complete graph K_N");
  graph->add_option("--bipartite", graph_cmd.bipartite, "K_{N/2,N/2}");
  graph->add_option("--random-regular", graph_cmd.random_regular, "N K")->expected(2);
  graph->add_option("--girth", graph_cmd.girth, "Minimum girth for --random-regular");
  graph->add_option("--file", graph_cmd.file, "Edge list or JSON descriptor");
  graph->add_option("--graph", graph_cmd.spec, "Graph spec string");
  graph->add_option("--edges-out", graph_cmd.edges_out, "Save the graph (.json for the JSON descriptor)");
  add_common(graph, common);

  SimulateCommand sim_cmd;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo fixation estimate or cooperator trace");
  simulate->add_option("--graph", sim_cmd.graph, "Graph spec")->required();
  simulate->add_option("--graph-seed", sim_cmd.graph_seed, "Seed for random graph specs");
  add_params(simulate, sim_cmd.params);
  simulate->add_option("--trials", sim_cmd.trials, "Independent trials")->capture_default_str();
  simulate->add_option("--max-steps", sim_cmd.max_steps, "Step cap per trial (default 20 k n^2)");
  simulate->add_option("--init", sim_cmd.init, "pair | uniform | bits:0101...")->capture_default_str();
  simulate->add_option("--trace", sim_cmd.trace, "HORIZON STRIDE: emit mean N_t instead")->expected(2);
  add_common(simulate, common);

  ExactCommand exact_cmd;
  auto* exact = app.add_subcommand("exact", "Exact absorption, drift formulas and birth-death chains");
  exact->add_flag("--absorb", exact_cmd.absorb, "Absorption probabilities and times over all 2^n states");
  exact->add_option("--graph", exact_cmd.graph, "Graph spec (for --absorb)");
  exact->add_option("--graph-seed", exact_cmd.graph_seed, "Seed for random graph specs");
  add_params(exact, exact_cmd.params);
  exact->add_option("--size-cap", exact_cmd.size_cap, "Largest n for --absorb")->capture_default_str();
  exact->add_option("--drift-complete", exact_cmd.drift_complete, "N Y B C")->expected(4);
  exact->add_option("--drift-bipartite", exact_cmd.drift_bipartite, "N Y1 Y2 B C")->expected(5);
  exact->add_option("--bd-hitting", exact_cmd.bd_hitting, "Chain CSV (state,up,down): all hitting times");
  exact->add_option("--bd-stationary", exact_cmd.bd_stationary, "Chain CSV: stationary distribution");
  exact->add_option("--lump", exact_cmd.lump, "Cooperator-count chain of K_N");
  add_common(exact, common);

  CorrCommand corr_cmd;
  auto* corr = app.add_subcommand("corr", "Exact voter-model correlations and drift series");
  corr->add_option("--graph", corr_cmd.graph, "Graph spec (girth >= 7)")->capture_default_str();
  corr->add_option("--graph-seed", corr_cmd.graph_seed, "Seed for random graph specs");
  corr->add_option("--b", corr_cmd.b, "Benefit")->capture_default_str();
  corr->add_option("--c", corr_cmd.c, "Cost")->capture_default_str();
  corr->add_option("--gamma", corr_cmd.gamma, "Horizon exponent")->capture_default_str();
  corr->add_flag("--no-truncate", corr_cmd.no_truncate, "Evaluate every step up to T*");
  corr->add_option("--max-steps", corr_cmd.max_steps, "Cap on evaluated steps");
  corr->add_option("--stride", corr_cmd.stride, "Emit every STRIDE-th row")->capture_default_str();
  corr->add_option("--summary", corr_cmd.summary_path, "Write the JSON summary here");
  corr->add_option("--format", corr_cmd.format, "csv (per-step rows) or json (summary only)")->capture_default_str();
  add_common(corr, common);

  SweepCommand sweep_cmd;
  auto* sweep = app.add_subcommand("sweep", "Grid over graphs, b/c and epsilon");
  sweep->add_option("--mode", sweep_cmd.mode, "corr | exact | mc")->capture_default_str();
  sweep->add_option("--graph", sweep_cmd.graphs, "Graph specs (repeatable)");
  sweep->add_option("--family", sweep_cmd.family, "complete | cycle | bipartite, combined with --n");
  sweep->add_option("--n", sweep_cmd.sizes, "Sizes for --family");
  sweep->add_option("--ratio", sweep_cmd.ratios, "b/c values (b = ratio * c)");
  sweep->add_option("--b", sweep_cmd.bs, "Benefit values");
  sweep->add_option("--c", sweep_cmd.c, "Cost")->capture_default_str();
  sweep->add_option("--epsilon", sweep_cmd.epsilons, "Selector probabilities (exact/mc modes)");
  sweep->add_option("--rule", sweep_cmd.rule, "Rule for exact/mc modes")->capture_default_str();
  sweep->add_option("--gamma", sweep_cmd.gamma, "Horizon exponent (corr mode)")->capture_default_str();
  sweep->add_option("--max-steps", sweep_cmd.max_steps, "Step cap");
  sweep->add_option("--trials", sweep_cmd.trials, "Trials (mc mode)")->capture_default_str();
  sweep->add_option("--graph-seed", sweep_cmd.graph_seed, "Seed for random graph specs");
  add_common(sweep, common);

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      out << app.help();
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kInvalidConfig;
    }
    CLI::App* chosen = app.get_subcommands().front();
    bool seed_given = false;
    for (const auto* opt : chosen->get_options()) {
      if (opt->get_name() == "--seed" && opt->count() > 0) seed_given = true;
    }
    if (common.deterministic && !seed_given) {
      err << "error: --deterministic requires --seed\n";
      return kInvalidConfig;
    }
    if (chosen == graph) run_graph(graph_cmd, common, out);
    if (chosen == simulate) run_simulate(sim_cmd, common, out);
    if (chosen == exact) run_exact(exact_cmd, common, out);
    if (chosen == corr) run_corr(corr_cmd, common, out);
    if (chosen == sweep) run_sweep(sweep_cmd, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kOk;
}

}  // namespace wis::cli
