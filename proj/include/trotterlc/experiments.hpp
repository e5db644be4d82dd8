#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "dense.hpp"
#include "exactsim.hpp"
#include "json.hpp"
#include "lightcone.hpp"
#include "models.hpp"
#include "pauli.hpp"
#include "trotter.hpp"

namespace tlc {

// Bad input: exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Budget or limit could not be met: exit code 3.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment = "bound";
  std::string model = "tfi";
  std::map<std::string, double> params;
  std::string file;
  std::string observable = "z0";
  int n = 8;
  std::vector<int> n_list;
  double t = 1.0;
  std::vector<double> t_list;
  bool t_equals_n = false;
  std::optional<int> r;
  std::optional<double> epsilon;
  int order = 2;
  std::string norm_mode = "dense";
  std::optional<std::string> merge;
  std::string coloring = "greedy";
  std::string bound = "thm1";
  std::string rand2_style = "triangle";
  std::string formula = "reduced";
  std::string decompose = "edge-sets";
  std::vector<int> lattice;
  double d0 = 2.0;
  int samples = 200;
  std::optional<uint64_t> seed;
  int budget = 500;
  int k = 3;
  double grid_step = 0.01;
  double grid_end = 3.0;
  double series_step = 0.05;
  int r_max = 100000;
  int dense_limit = kDefaultDenseLimit;
  std::string output;
  std::string format = "json";
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = c.experiment;
  j["model"] = c.model;
  j["params"] = c.params;
  j["file"] = c.file;
  j["observable"] = c.observable;
  j["n"] = c.n;
  j["n_list"] = c.n_list;
  j["t"] = c.t;
  j["t_list"] = c.t_list;
  j["t_equals_n"] = c.t_equals_n;
  j["r"] = c.r ? nlohmann::json(*c.r) : nlohmann::json(nullptr);
  j["epsilon"] = c.epsilon ? nlohmann::json(*c.epsilon) : nlohmann::json(nullptr);
  j["order"] = c.order;
  j["norm_mode"] = c.norm_mode;
  j["merge"] = c.merge ? nlohmann::json(*c.merge) : nlohmann::json(nullptr);
  j["coloring"] = c.coloring;
  j["bound"] = c.bound;
  j["rand2_style"] = c.rand2_style;
  j["formula"] = c.formula;
  j["decompose"] = c.decompose;
  j["lattice"] = c.lattice;
  j["d0"] = c.d0;
  j["samples"] = c.samples;
  j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
  j["budget"] = c.budget;
  j["k"] = c.k;
  j["grid_step"] = c.grid_step;
  j["grid_end"] = c.grid_end;
  j["series_step"] = c.series_step;
  j["r_max"] = c.r_max;
  j["dense_limit"] = c.dense_limit;
  j["output"] = c.output;
  j["format"] = c.format;
  return j;
}

// Keys absent from j keep their current value in c.
inline void merge_json(ExperimentConfig& c, const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "experiment", "model",     "params",      "file",        "observable", "n",
      "n_list",     "t",         "t_list",      "t_equals_n",  "r",          "epsilon",
      "order",      "norm_mode", "merge",       "coloring",    "bound",      "rand2_style",
      "formula",    "decompose", "lattice",     "d0",          "samples",    "seed",
      "budget",     "k",         "grid_step",   "grid_end",    "series_step", "r_max",
      "dense_limit", "output",   "format"};
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  for (auto& [key, v] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  try {
    auto get = [&](const char* key, auto& dst) {
      if (j.contains(key)) j.at(key).get_to(dst);
    };
    auto get_opt = [&](const char* key, auto& dst) {
      if (!j.contains(key)) return;
      if (j.at(key).is_null()) dst.reset();
      else dst = j.at(key).get<typename std::decay_t<decltype(dst)>::value_type>();
    };
    get("experiment", c.experiment);
    get("model", c.model);
    get("params", c.params);
    get("file", c.file);
    get("observable", c.observable);
    get("n", c.n);
    get("n_list", c.n_list);
    get("t", c.t);
    get("t_list", c.t_list);
    get("t_equals_n", c.t_equals_n);
    get_opt("r", c.r);
    get_opt("epsilon", c.epsilon);
    get("order", c.order);
    get("norm_mode", c.norm_mode);
    get_opt("merge", c.merge);
    get("coloring", c.coloring);
    get("bound", c.bound);
    get("rand2_style", c.rand2_style);
    get("formula", c.formula);
    get("decompose", c.decompose);
    get("lattice", c.lattice);
    get("d0", c.d0);
    get("samples", c.samples);
    get_opt("seed", c.seed);
    get("budget", c.budget);
    get("k", c.k);
    get("grid_step", c.grid_step);
    get("grid_end", c.grid_end);
    get("series_step", c.series_step);
    get("r_max", c.r_max);
    get("dense_limit", c.dense_limit);
    get("output", c.output);
    get("format", c.format);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

// Fills experiment-dependent defaults so the echoed config is the one used.
inline void resolve_defaults(ExperimentConfig& c) {
  if (c.experiment == "dqpt") {
    c.observable = "proj" + std::to_string(c.k);
    if (!c.merge) c.merge = "step";
  }
  if (!c.merge) c.merge = "adjacent";
}

inline double param(const ExperimentConfig& c, const std::string& key, double fallback) {
  auto it = c.params.find(key);
  return it == c.params.end() ? fallback : it->second;
}

inline bool powerlaw_alpha_warning(const ExperimentConfig& c) {
  if (c.model != "powerlaw") return false;
  int D = c.lattice.empty() ? 1 : static_cast<int>(c.lattice.size());
  return param(c, "alpha", 4.0) <= 2.0 * D;
}

// Power-law couplings over Euclidean lattice distance.
inline PauliSum build_power_law_lattice(const LatticeSpec& lat, double J, double h,
                                        double alpha) {
  validate(lat);
  int n = lat.sites();
  if (n < 2) throw ModelError("power-law needs n >= 2");
  PauliSum out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double c = J / std::pow(lat.distance(i, j), alpha);
      for (char p : {'X', 'Y', 'Z'}) out.add(PauliString::sites(n, {{i, p}, {j, p}}), c);
    }
  for (int j = 0; j < n; ++j) out.add(PauliString::sites(n, {{j, 'X'}}), h);
  return out;
}

inline LatticeSpec lattice_of(const ExperimentConfig& c, int n) {
  if (c.model == "nn2d") {
    if (c.lattice.size() == 2) return LatticeSpec{c.lattice};
    int lx = static_cast<int>(param(c, "Lx", 0)), ly = static_cast<int>(param(c, "Ly", 0));
    if (lx < 1 || ly < 1) throw ConfigError("nn2d needs Lx and Ly (or --lattice)");
    return LatticeSpec{{lx, ly}};
  }
  if (!c.lattice.empty()) {
    LatticeSpec l{c.lattice};
    if (l.sites() != n) throw ConfigError("lattice extents do not multiply to n");
    return l;
  }
  return LatticeSpec::chain(n);
}

inline PauliSum build_model(const ExperimentConfig& c, int n) {
  try {
    if (c.model == "mfi")
      return build_mfi(n, param(c, "J", 1), param(c, "h", 0.5), param(c, "g", 1.2));
    if (c.model == "tfi") return build_tfi(n, param(c, "J", 1), param(c, "h", 1));
    if (c.model == "powerlaw") {
      double J = param(c, "J", 1), h = param(c, "h", 0.5), a = param(c, "alpha", 4);
      if (c.lattice.size() > 1) return build_power_law_lattice(lattice_of(c, n), J, h, a);
      return build_power_law(n, J, h, a);
    }
    if (c.model == "nn2d") {
      auto lat = lattice_of(c, n);
      PauliSum tmpl(PauliString::from_string("ZZ"), param(c, "J", 1));
      PauliSum out = build_nn_lattice(lat, tmpl);
      double h = param(c, "h", 1);
      for (int j = 0; j < lat.sites(); ++j)
        out.add(PauliString::sites(lat.sites(), {{j, 'X'}}), h);
      return out;
    }
    if (c.model == "file") {
      if (c.file.empty()) throw ConfigError("--model file needs --file");
      return load_pauli_file(c.file);
    }
  } catch (const ModelError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown model '" + c.model + "'");
}

inline int model_size(const ExperimentConfig& c) {
  if (c.model == "nn2d") return lattice_of(c, 0).sites();
  return c.n;
}

// Observable specs: z<q>, x<q>, sumz, meanzz, proj<k>, a Pauli word of length
// n, or @path for a Pauli file.
inline PauliSum build_observable(const std::string& spec, int n) {
  auto index = [&](size_t from) {
    try {
      size_t used = 0;
      int v = std::stoi(spec.substr(from), &used);
      if (used + from != spec.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (...) {
      throw ConfigError("bad observable '" + spec + "'");
    }
  };
  if (spec == "sumz") return sum_z(n);
  if (spec == "meanzz") return mean_zz(n);
  if (spec.rfind("proj", 0) == 0) return zero_projector(n, index(4));
  if (!spec.empty() && spec[0] == '@') {
    auto o = load_pauli_file(spec.substr(1));
    if (o.n() != n) throw ConfigError("observable file has n=" + std::to_string(o.n()));
    return o;
  }
  if (spec.size() >= 2 && (spec[0] == 'z' || spec[0] == 'x' || spec[0] == 'y') &&
      std::isdigit(static_cast<unsigned char>(spec[1]))) {
    int q = index(1);
    if (q < 0 || q >= n) throw ConfigError("observable qubit out of range");
    return PauliSum(PauliString::sites(n, {{q, static_cast<char>(std::toupper(spec[0]))}}), 1.0);
  }
  if (static_cast<int>(spec.size()) == n) {
    try {
      return PauliSum(PauliString::from_string(spec), 1.0);
    } catch (const PauliError&) {
    }
  }
  throw ConfigError("bad observable '" + spec + "'");
}

// One part per Pauli term: higher weight first, then word order. For the
// Ising chains this is all couplings followed by all fields.
inline std::vector<PauliSum> term_parts(const PauliSum& h) {
  std::vector<std::pair<PauliString, double>> terms(h.terms().begin(), h.terms().end());
  std::stable_sort(terms.begin(), terms.end(), [](auto& a, auto& b) {
    return a.first.weight() > b.first.weight();
  });
  std::vector<PauliSum> parts;
  for (auto& [p, c] : terms)
    if (!p.is_identity()) parts.emplace_back(p, c);
  return parts;
}

inline std::vector<PauliSum> observable_summands(const PauliSum& o) {
  std::vector<PauliSum> out;
  for (auto& [p, c] : o.terms()) out.emplace_back(p, c);
  return out;
}

inline Coloring make_coloring(const ExperimentConfig& c, const InteractionHypergraph& g) {
  if (c.coloring == "greedy") return color_greedy(g);
  if (c.coloring == "lattice_parity" || c.coloring == "lattice-parity")
    return color_lattice_parity(g, lattice_of(c, g.n));
  throw ConfigError("unknown coloring '" + c.coloring + "'");
}

inline NormMode norm_mode_of(const ExperimentConfig& c) {
  try {
    return parse_norm_mode(c.norm_mode);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

inline Merge merge_of(const ExperimentConfig& c, Merge fallback = Merge::adjacent) {
  try {
    return c.merge ? parse_merge(*c.merge) : fallback;
  } catch (const TrotterError& e) {
    throw ConfigError(e.what());
  }
}

// Everything one bound/circuit pair needs for a given model instance.
struct Instance {
  PauliSum h;
  PauliSum o;
  std::vector<PauliSum> parts;
  InteractionHypergraph graph;
  Coloring coloring;
};

inline Instance make_instance(const ExperimentConfig& c, int n) {
  Instance in;
  in.h = build_model(c, n);
  in.o = build_observable(c.observable, in.h.n());
  in.parts = term_parts(in.h);
  in.graph = build_hypergraph(in.h);
  in.coloring = make_coloring(c, in.graph);
  return in;
}

// Observable support for the light-cone bound; the identity part is dropped.
inline SupportSet light_cone_support(const PauliSum& o) {
  auto s = o.support();
  if (s.empty()) throw ConfigError("observable has no non-identity part");
  return s;
}

inline BoundReport evaluate_bound(const std::string& name, const Instance& in,
                                  const ExperimentConfig& c, double t, int r) {
  NormMode mode = norm_mode_of(c);
  int lim = c.dense_limit;
  if (name != "rand2" && name != "rand2-t2" && name != "rand1" && c.order != 2)
    throw ConfigError("explicit light-cone and worst-case constants exist only for order 2");
  if (name == "worst")
    return worst_case_p2_bound(in.parts, operator_norm(in.o, mode, lim), t, r, mode, lim);
  if (name == "thm1")
    return thm1_bound(in.h, light_cone_support(in.o), operator_norm(in.o, mode, lim), t, r,
                      mode, lim);
  if (name == "thm2")
    return thm2_bound(in.h, observable_summands(in.o), in.graph, in.coloring, t, r, mode, lim);
  if (name == "rand2")
    return random_2design_bound(in.parts, in.o, t, r, c.order,
                                c.rand2_style == "t2" ? Rand2Style::nested_T2
                                                      : Rand2Style::triangle_p2);
  if (name == "rand2-t2")
    return random_2design_bound(in.parts, in.o, t, r, c.order, Rand2Style::nested_T2);
  if (name == "rand-noobs")
    return random_bound_no_observable(in.parts, operator_norm(in.o, mode, lim), t, r);
  if (name == "rand1") return random_1design_bound(in.parts, in.o, t, r);
  throw ConfigError("unknown bound '" + name + "'");
}

inline Circuit circuit_for_bound(const std::string& name, const Instance& in, double t, int r,
                                 int p, Merge merge) {
  if (name == "thm1") return reduced_formula(in.h, light_cone_support(in.o), t, r, p, merge);
  if (name == "thm2") return chromatic_formula(in.graph, in.coloring, t, r, p, merge);
  return standard_formula(in.parts, t, r, p, merge);
}

// Bound value at (t, r) given that it scales as t^3 at fixed r.
class CachedBound {
 public:
  CachedBound(std::string name, const Instance& in, const ExperimentConfig& c)
      : name_(std::move(name)), in_(in), c_(c) {}

  double operator()(double t, int r) {
    auto it = unit_.find(r);
    if (it == unit_.end()) it = unit_.emplace(r, evaluate_bound(name_, in_, c_, 1.0, r).value).first;
    return it->second * t * t * t;
  }

 private:
  std::string name_;
  const Instance& in_;
  const ExperimentConfig& c_;
  std::map<int, double> unit_;
};

// ---- tables ----

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void add(std::vector<nlohmann::json> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width differs from header");
    rows.push_back(std::move(row));
  }
};

inline std::string csv_cell(const nlohmann::json& v) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

inline std::string render(const Table& tab, const std::string& format,
                          const nlohmann::json& config) {
  std::ostringstream out;
  if (format == "csv") {
    out << "# config " << config.dump() << "\n";
    for (size_t i = 0; i < tab.columns.size(); ++i) out << (i ? "," : "") << tab.columns[i];
    out << "\n";
    for (auto& row : tab.rows) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
      out << "\n";
    }
    return out.str();
  }
  if (format != "json") throw ConfigError("unknown format '" + format + "'");
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (auto& row : tab.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (size_t i = 0; i < row.size(); ++i) obj[tab.columns[i]] = row[i];
    rows.push_back(obj);
  }
  nlohmann::ordered_json doc;
  doc["config"] = config;
  doc["rows"] = rows;
  return doc.dump(2) + "\n";
}

// Writes to path, or stdout when path is empty or "-".
inline void emit_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
  if (!f) throw ConfigError("write failed for " + path);
}

inline void emit(const Table& tab, const std::string& format, const std::string& path,
                 const nlohmann::json& config) {
  emit_text(render(tab, format, config), path);
}

// ---- experiments ----

inline std::vector<int> sweep_sizes(const ExperimentConfig& c) {
  return c.n_list.empty() ? std::vector<int>{c.n} : c.n_list;
}

inline Table run_gatecount(const ExperimentConfig& c) {
  if (!c.epsilon) throw ConfigError("gatecount needs --epsilon");
  Merge merge = merge_of(c);
  Table tab{{"n", "method", "bound_r", "exponential_count", "flag"}, {}};
  for (int n : sweep_sizes(c)) {
    auto in = make_instance(c, n);
    for (std::string method : {"worst", "thm1", "thm2"}) {
      CachedBound b(method, in, c);
      auto r = steps_for_epsilon([&](int rr) { return b(c.t, rr); }, *c.epsilon, c.r_max);
      if (!r) {
        tab.add({n, method, nullptr, nullptr, "unreachable"});
        continue;
      }
      auto circ = circuit_for_bound(method, in, c.t, *r, c.order, merge);
      tab.add({n, method, *r, gate_count(circ), ""});
    }
  }
  return tab;
}

struct GuaranteedTime {
  std::string bound;
  double t = 0;
  int r = 0;
  double dt = 0;
  long count = 0;
  bool found = false;
};

inline std::vector<double> scan_grid(double step, double end) {
  if (!(step > 0) || !(end > 0)) throw ConfigError("grid step and end must be positive");
  std::vector<double> g;
  long m = std::lround(end / step);
  for (long i = 1; i <= m; ++i) g.push_back(static_cast<double>(i) * step);
  return g;
}

// Largest grid time whose step count for epsilon fits the gate budget.
inline GuaranteedTime guaranteed_time(const std::string& bound, const Instance& in,
                                      const ExperimentConfig& c, Merge merge) {
  if (!c.epsilon) throw ConfigError("dqpt needs --epsilon");
  CachedBound b(bound, in, c);
  std::map<int, long> counts;
  GuaranteedTime g;
  g.bound = bound;
  for (double t : scan_grid(c.grid_step, c.grid_end)) {
    auto r = steps_for_epsilon([&](int rr) { return b(t, rr); }, *c.epsilon, c.r_max);
    if (!r) break;
    auto it = counts.find(*r);
    if (it == counts.end())
      it = counts.emplace(*r, gate_count(circuit_for_bound(bound, in, 1.0, *r, c.order, merge)))
               .first;
    if (it->second > c.budget) break;
    g = {bound, t, *r, t / *r, it->second, true};
  }
  return g;
}

struct DqptResult {
  std::vector<GuaranteedTime> times;
  Table series;
};

inline DqptResult run_dqpt(const ExperimentConfig& cfg, bool with_series = true) {
  ExperimentConfig c = cfg;
  c.experiment = "dqpt";
  resolve_defaults(c);
  Merge merge = merge_of(c);
  auto in = make_instance(c, model_size(c));
  DqptResult res;
  for (std::string b : {"worst", "thm1"}) {
    auto g = guaranteed_time(b, in, c, merge);
    if (!g.found) throw BudgetError("budget too small for any t with bound " + b);
    res.times.push_back(g);
  }
  res.series.columns = {"t", "exact", "worst", "thm1"};
  if (!with_series) return res;
  auto grid = scan_grid(c.series_step, c.grid_end);
  grid.insert(grid.begin(), 0.0);
  auto exact = rate_function(in.h, c.k, grid, nullptr, c.dense_limit);
  std::vector<std::vector<RatePoint>> approx;
  for (auto& g : res.times) {
    double dt = g.dt;
    std::string name = g.bound;
    approx.push_back(rate_function(
        in.h, c.k, grid,
        [&, dt, name](double t) {
          int r = std::max(1, static_cast<int>(std::ceil(t / dt - 1e-9)));
          return circuit_for_bound(name, in, t, r, c.order, merge);
        },
        c.dense_limit));
  }
  for (size_t i = 0; i < grid.size(); ++i)
    res.series.add({grid[i], exact[i].lambda, approx[0][i].lambda, approx[1][i].lambda});
  return res;
}

inline Table dqpt_summary(const DqptResult& d) {
  Table tab{{"bound", "guaranteed_t", "r", "step_length", "exponential_count"}, {}};
  for (auto& g : d.times) tab.add({g.bound, g.t, g.r, g.dt, g.count});
  return tab;
}

inline Table run_random(const ExperimentConfig& c) {
  if (!c.r) throw ConfigError("random needs --r");
  if (!c.seed) throw ConfigError("random needs --seed");
  int r = *c.r;
  Table tab{{"x", "worst_bound", "noobs_bound", "ours_bound", "rand1_bound", "empirical_mean",
             "empirical_std", "empirical_variance", "variance_bound", "flag"},
            {}};
  auto row_for = [&](double x, const PauliSum& h, const std::vector<PauliSum>& parts,
                     const std::vector<PauliSum>& obs, double t) {
    double worst = 0, noobs = 0, ours = 0, r1 = 0, mean = 0, sd = 0, var = 0, vb = 0;
    bool dense_ok = h.n() <= c.dense_limit;
    NormMode mode = dense_ok ? norm_mode_of(c) : NormMode::one_norm;
    Circuit circ = standard_formula(parts, t, r, 2, merge_of(c));
    for (auto& o : obs) {
      double on = operator_norm(o, mode, c.dense_limit);
      worst += worst_case_p2_bound(parts, on, t, r, mode, c.dense_limit).value;
      noobs += random_bound_no_observable(parts, on, t, r).value;
      auto b2 = random_2design_bound(parts, o, t, r, 2);
      ours += b2.value;
      vb += b2.extras.at("variance_bound");
      r1 += random_1design_bound(parts, o, t, r).value;
      if (dense_ok) {
        auto s = empirical_average_error(h, o, circ, t, c.samples, *c.seed, c.dense_limit);
        mean += s.mean;
        sd += s.stddev;
        var += s.variance;
      }
    }
    if (dense_ok)
      tab.add({x, worst, noobs, ours, r1, mean, sd, var, vb, ""});
    else
      tab.add({x, worst, noobs, ours, r1, nullptr, nullptr, nullptr, vb, "bounds-only"});
  };
  if (c.model == "file") {
    // Molecular mode: commuting groups of H are the parts, and the observable
    // is split into commuting groups whose results are summed.
    auto h = build_model(c, 0);
    auto o = build_observable(c.observable, h.n());
    auto parts = group_commuting(h);
    auto obs = group_commuting(o);
    auto ts = c.t_list.empty() ? std::vector<double>{c.t} : c.t_list;
    for (double t : ts) row_for(t, h, parts, obs, t);
    return tab;
  }
  for (int n : sweep_sizes(c)) {
    auto h = build_model(c, n);
    auto o = build_observable(c.observable, h.n());
    double t = c.t_equals_n ? static_cast<double>(n) : c.t;
    row_for(n, h, term_parts(h), {o}, t);
  }
  return tab;
}

inline Circuit build_formula(const ExperimentConfig& c, const Instance& in, double t, int r) {
  Merge m = merge_of(c);
  if (c.formula == "reduced") return reduced_formula(in.h, light_cone_support(in.o), t, r, c.order, m);
  if (c.formula == "chromatic") return chromatic_formula(in.graph, in.coloring, t, r, c.order, m);
  if (c.formula == "standard") return standard_formula(in.parts, t, r, c.order, m);
  if (c.formula == "virtual")
    return virtual_formula(edge_sets(in.h, light_cone_support(in.o)), t, r, c.order, m);
  throw ConfigError("unknown formula '" + c.formula + "'");
}

inline Table run_simulate(const ExperimentConfig& c) {
  if (!c.r) throw ConfigError("simulate needs --r");
  auto in = make_instance(c, model_size(c));
  auto circ = build_formula(c, in, c.t, *c.r);
  double err = heisenberg_error(in.h, in.o, circ, c.t, c.dense_limit);
  Table tab{{"n", "formula", "t", "r", "order", "exponential_count", "heisenberg_error"}, {}};
  tab.add({in.h.n(), c.formula, c.t, *c.r, c.order, gate_count(circ), err});
  return tab;
}

inline nlohmann::json run_decompose(const ExperimentConfig& c) {
  int n = model_size(c);
  auto h = build_model(c, n);
  nlohmann::json out;
  out["config"] = to_json(c);
  if (c.decompose == "edge-sets") {
    auto o = build_observable(c.observable, h.n());
    auto d = edge_sets(h, light_cone_support(o));
    nlohmann::json layers = nlohmann::json::array();
    for (size_t k = 0; k < d.subs.size(); ++k)
      layers.push_back({{"k", k}, {"edge_set", d.edges[k]}, {"sub", to_json(d.subs[k])}});
    out["layers"] = layers;
    out["tail"] = to_json(d.tail);
  } else if (c.decompose == "hypergraph") {
    auto g = build_hypergraph(h);
    auto col = make_coloring(c, g);
    nlohmann::json edges = nlohmann::json::array();
    for (int i = 0; i < g.size(); ++i)
      edges.push_back({{"support", g.edges[i]}, {"color", col.color[i]}, {"sub", to_json(g.parts[i])}});
    out["hyperedges"] = edges;
    out["chi"] = col.chi;
  } else if (c.decompose == "cubes") {
    auto lat = lattice_of(c, h.n());
    auto tr = truncate_power_law(h, lat, c.d0);
    auto cr = cube_regroup(tr.kept, lat, c.d0);
    nlohmann::json edges = nlohmann::json::array();
    for (int i = 0; i < cr.graph.size(); ++i)
      edges.push_back({{"support", cr.graph.edges[i]},
                       {"color", cr.coloring.color[i]},
                       {"sub", to_json(cr.graph.parts[i])}});
    out["groups"] = edges;
    out["chi"] = cr.coloring.chi;
    out["cubes"] = cr.cubes;
    out["removed_one_norm"] = tr.removed_one_norm;
  } else {
    throw ConfigError("unknown decomposition '" + c.decompose + "'");
  }
  return out;
}

}  // namespace tlc
