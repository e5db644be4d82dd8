// trotterlc: command-line front end for the product-formula toolkit.

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trotterlc/experiments.hpp"

namespace {

using tlc::ExperimentConfig;

// CLI values are collected first and applied over the config file afterwards.
struct Overrides {
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> setters;

  template <class T, class F>
  void add(CLI::App& app, const std::string& name, const std::string& help, T& slot, F apply) {
    auto* opt = app.add_option(name, slot, help);
    setters.push_back({opt, [&slot, apply](ExperimentConfig& c) { apply(c, slot); }});
  }

  void apply(ExperimentConfig& c) const {
    for (auto& [opt, set] : setters)
      if (opt->count() > 0) set(c);
  }
};

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dots = item.find("..");
    try {
      if (dots != std::string::npos) {
        int a = std::stoi(item.substr(0, dots)), b = std::stoi(item.substr(dots + 2));
        for (int v = a; v <= b; ++v) out.push_back(v);
      } else if (!item.empty()) {
        out.push_back(std::stoi(item));
      }
    } catch (...) {
      throw tlc::ConfigError("bad integer list '" + s + "'");
    }
  }
  return out;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      if (!item.empty()) out.push_back(std::stod(item));
    } catch (...) {
      throw tlc::ConfigError("bad number list '" + s + "'");
    }
  }
  return out;
}

int run(const std::string& cmd, ExperimentConfig& c, bool search_r,
        const std::string& emit_circuit) {
  c.experiment = cmd;
  tlc::resolve_defaults(c);
  if (c.epsilon && !(*c.epsilon > 0)) throw tlc::ConfigError("epsilon must be positive");
  if (tlc::powerlaw_alpha_warning(c))
    std::cerr << "warning: power-law alpha <= 2D; truncation bounds lose their decay\n";
  auto config = tlc::to_json(c);

  if (cmd == "bound") {
    auto in = tlc::make_instance(c, tlc::model_size(c));
    nlohmann::json out;
    out["config"] = config;
    if (search_r) {
      if (!c.epsilon) throw tlc::ConfigError("--search-r needs --epsilon");
      tlc::CachedBound b(c.bound, in, c);
      auto r = tlc::steps_for_epsilon([&](int rr) { return b(c.t, rr); }, *c.epsilon, c.r_max);
      if (!r) {
        std::cerr << "error: epsilon not reached within r_max=" << c.r_max << "\n";
        return 3;
      }
      c.r = *r;
      out["search_r"] = *r;
    }
    if (!c.r) throw tlc::ConfigError("bound needs --r or --search-r");
    out["report"] = tlc::to_json(tlc::evaluate_bound(c.bound, in, c, c.t, *c.r));
    if (!emit_circuit.empty())
      tlc::emit_text(tlc::to_json(tlc::circuit_for_bound(c.bound, in, c.t, *c.r, c.order,
                                                         tlc::merge_of(c)))
                             .dump(2) + "\n",
                     emit_circuit);
    tlc::emit_text(out.dump(2) + "\n", c.output);
    return 0;
  }
  if (cmd == "gatecount") {
    tlc::emit(tlc::run_gatecount(c), c.format, c.output, config);
    return 0;
  }
  if (cmd == "dqpt") {
    auto res = tlc::run_dqpt(c);
    if (c.format == "json") {
      nlohmann::json out;
      out["config"] = config;
      out["guaranteed"] = nlohmann::json::array();
      for (auto& g : res.times)
        out["guaranteed"].push_back({{"bound", g.bound},
                                     {"guaranteed_t", g.t},
                                     {"r", g.r},
                                     {"step_length", g.dt},
                                     {"exponential_count", g.count}});
      auto series = nlohmann::json::array();
      for (auto& row : res.series.rows) {
        nlohmann::json o;
        for (size_t i = 0; i < row.size(); ++i) o[res.series.columns[i]] = row[i];
        series.push_back(o);
      }
      out["series"] = series;
      tlc::emit_text(out.dump(2) + "\n", c.output);
    } else {
      std::string path = c.output;
      tlc::emit(tlc::dqpt_summary(res), c.format, path, config);
      std::string spath = path.empty() || path == "-" ? path : path + ".series.csv";
      tlc::emit(res.series, c.format, spath, config);
    }
    return 0;
  }
  if (cmd == "random") {
    tlc::emit(tlc::run_random(c), c.format, c.output, config);
    return 0;
  }
  if (cmd == "simulate") {
    if (!emit_circuit.empty()) {
      auto in = tlc::make_instance(c, tlc::model_size(c));
      if (!c.r) throw tlc::ConfigError("simulate needs --r");
      tlc::emit_text(tlc::to_json(tlc::build_formula(c, in, c.t, *c.r)).dump(2) + "\n",
                     emit_circuit);
    }
    tlc::emit(tlc::run_simulate(c), c.format, c.output, config);
    return 0;
  }
  if (cmd == "decompose") {
    tlc::emit_text(tlc::run_decompose(c).dump(2) + "\n", c.output);
    return 0;
  }
  throw tlc::ConfigError("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Observable-aware product formulas: bounds, gate counts and dense checks"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides ov;
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);

  std::string model, params, file, observable, n_list, t_list, norm_mode, merge, output, format;
  std::string coloring, bound, formula, decompose, lattice, rand2_style;
  int n = 0, r = 0, order = 0, samples = 0, budget = 0, k = 0, r_max = 0, dense_limit = 0;
  double t = 0, epsilon = 0, d0 = 0, grid_step = 0, grid_end = 0, series_step = 0;
  uint64_t seed = 0;

  ov.add(app, "--model", "mfi|tfi|powerlaw|nn2d|file", model,
         [](ExperimentConfig& c, const std::string& v) { c.model = v; });
  ov.add(app, "--params", "J=..,h=..,g=..,alpha=..", params,
         [](ExperimentConfig& c, const std::string& v) {
           for (auto& [key, val] : tlc::parse_params(v)) c.params[key] = val;
         });
  ov.add(app, "--file", "Hamiltonian file (text or JSON)", file,
         [](ExperimentConfig& c, const std::string& v) { c.file = v; });
  ov.add(app, "--observable", "z<q>|x<q>|sumz|meanzz|proj<k>|<word>|@path", observable,
         [](ExperimentConfig& c, const std::string& v) { c.observable = v; });
  ov.add(app, "--n", "number of qubits", n, [](ExperimentConfig& c, int v) { c.n = v; });
  ov.add(app, "--n-list", "sweep sizes, e.g. 4..10 or 20,50,100", n_list,
         [](ExperimentConfig& c, const std::string& v) { c.n_list = parse_ints(v); });
  ov.add(app, "--t", "evolution time", t, [](ExperimentConfig& c, double v) { c.t = v; });
  ov.add(app, "--t-list", "comma-separated times", t_list,
         [](ExperimentConfig& c, const std::string& v) { c.t_list = parse_reals(v); });
  ov.add(app, "--r", "Trotter steps", r, [](ExperimentConfig& c, int v) { c.r = v; });
  ov.add(app, "--order", "formula order p (1 or even)", order,
         [](ExperimentConfig& c, int v) { c.order = v; });
  ov.add(app, "--epsilon", "target error", epsilon,
         [](ExperimentConfig& c, double v) { c.epsilon = v; });
  ov.add(app, "--samples", "Haar samples", samples,
         [](ExperimentConfig& c, int v) { c.samples = v; });
  ov.add(app, "--seed", "RNG seed", seed, [](ExperimentConfig& c, uint64_t v) { c.seed = v; });
  ov.add(app, "--norm-mode", "dense|one-norm", norm_mode,
         [](ExperimentConfig& c, const std::string& v) { c.norm_mode = v; });
  ov.add(app, "--merge", "none|adjacent|step", merge,
         [](ExperimentConfig& c, const std::string& v) { c.merge = v; });
  ov.add(app, "--coloring", "greedy|lattice_parity", coloring,
         [](ExperimentConfig& c, const std::string& v) { c.coloring = v; });
  ov.add(app, "--bound", "worst|thm1|thm2|rand2|rand2-t2|rand1|rand-noobs", bound,
         [](ExperimentConfig& c, const std::string& v) { c.bound = v; });
  ov.add(app, "--rand2-style", "triangle|t2", rand2_style,
         [](ExperimentConfig& c, const std::string& v) { c.rand2_style = v; });
  ov.add(app, "--formula", "reduced|chromatic|standard|virtual", formula,
         [](ExperimentConfig& c, const std::string& v) { c.formula = v; });
  ov.add(app, "--decompose", "edge-sets|hypergraph|cubes", decompose,
         [](ExperimentConfig& c, const std::string& v) { c.decompose = v; });
  ov.add(app, "--lattice", "extents, e.g. 3,3", lattice,
         [](ExperimentConfig& c, const std::string& v) { c.lattice = parse_ints(v); });
  ov.add(app, "--d0", "truncation distance / cube side", d0,
         [](ExperimentConfig& c, double v) { c.d0 = v; });
  ov.add(app, "--budget", "gate budget", budget, [](ExperimentConfig& c, int v) { c.budget = v; });
  ov.add(app, "--k", "projector size for the rate function", k,
         [](ExperimentConfig& c, int v) { c.k = v; });
  ov.add(app, "--grid-step", "guaranteed-time grid step", grid_step,
         [](ExperimentConfig& c, double v) { c.grid_step = v; });
  ov.add(app, "--grid-end", "guaranteed-time grid end", grid_end,
         [](ExperimentConfig& c, double v) { c.grid_end = v; });
  ov.add(app, "--series-step", "rate-function series step", series_step,
         [](ExperimentConfig& c, double v) { c.series_step = v; });
  ov.add(app, "--r-max", "largest step count searched", r_max,
         [](ExperimentConfig& c, int v) { c.r_max = v; });
  ov.add(app, "--dense-limit", "largest n for dense evaluation", dense_limit,
         [](ExperimentConfig& c, int v) { c.dense_limit = v; });
  ov.add(app, "--output", "output path (default stdout)", output,
         [](ExperimentConfig& c, const std::string& v) { c.output = v; });
  ov.add(app, "--format", "csv|json", format,
         [](ExperimentConfig& c, const std::string& v) { c.format = v; });
  auto* no_merge = app.add_flag("--no-merge", "disable identical-generator merging");
  auto* t_eq_n = app.add_flag("--t-equals-n", "random sweep: use t = n");
  std::string emit_circuit;
  app.add_option("--emit-circuit", emit_circuit, "write the circuit as JSON");

  bool search_r = false;
  auto* bound_cmd = app.add_subcommand("bound", "evaluate one error bound");
  bound_cmd->add_flag("--search-r", search_r, "find the smallest r meeting --epsilon");
  app.add_subcommand("gatecount", "step counts and exponential counts per method");
  app.add_subcommand("dqpt", "guaranteed times and rate-function series");
  app.add_subcommand("random", "random-input bounds against Haar-sampled errors");
  app.add_subcommand("simulate", "dense Heisenberg error of one circuit");
  app.add_subcommand("decompose", "dump edge sets, hypergraph or cube groups");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig c;
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw tlc::ConfigError(config_file + ": " + e.what());
      }
      tlc::merge_json(c, j);
    }
    ov.apply(c);
    if (no_merge->count() > 0) c.merge = "none";
    if (t_eq_n->count() > 0) c.t_equals_n = true;
    return run(app.get_subcommands().front()->get_name(), c, search_r, emit_circuit);
  } catch (const tlc::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tlc::DenseLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tlc::BoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
