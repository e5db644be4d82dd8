#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lightcone.hpp"
#include "pauli.hpp"

namespace tlc {

class TrotterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SuzukiSchedule {
  int p = 2;
  int stages = 2;
  std::vector<double> coef;  // one value per stage, shared by every slot

  double a(int stage, int /*slot*/) const { return coef.at(stage); }
  // Stages are 0-based here; stage 0 runs forward.
  static bool forward(int stage) { return stage % 2 == 0; }
};

inline double suzuki_u(int p) { return 1.0 / (4.0 - std::pow(4.0, 1.0 / (p - 1))); }

inline SuzukiSchedule suzuki_schedule(int p) {
  if (p == 1) return {1, 1, {1.0}};
  if (p < 1 || p % 2 != 0) throw TrotterError("order must be 1 or a positive even integer");
  SuzukiSchedule s{2, 2, {0.5, 0.5}};
  for (int q = 4; q <= p; q += 2) {
    double u = suzuki_u(q);
    std::vector<double> next;
    for (int rep = 0; rep < 5; ++rep) {
      double w = rep == 2 ? 1.0 - 4.0 * u : u;
      for (double c : s.coef) next.push_back(w * c);
    }
    s = {q, static_cast<int>(next.size()), next};
  }
  return s;
}

// exp(i * angle * gen). Gates are listed in application order: the first
// gate is the innermost factor of U = g_m ... g_1, so it meets O first.
struct Gate {
  PauliSum gen;
  double angle = 0;
  int step = 0;
  SupportSet support;
};

struct Circuit {
  int n = 0;
  std::vector<Gate> gates;

  size_t size() const { return gates.size(); }
};

// none: keep every exponential. adjacent: fuse neighbouring identical
// generators, also across steps. step: inside one step, fuse with an earlier
// identical generator when every gate in between commutes with it.
enum class Merge { none, adjacent, step };

inline Merge parse_merge(const std::string& s) {
  if (s == "none") return Merge::none;
  if (s == "adjacent") return Merge::adjacent;
  if (s == "step") return Merge::step;
  throw TrotterError("unknown merge mode '" + s + "'");
}

inline std::string to_string(Merge m) {
  return m == Merge::none ? "none" : m == Merge::adjacent ? "adjacent" : "step";
}

class CircuitBuilder {
 public:
  CircuitBuilder(int n, Merge merge) : merge_(merge) { c_.n = n; }

  void push(const PauliSum& gen, double angle, int step) {
    if (gen.empty() || angle == 0.0) return;
    if (!std::isfinite(angle)) throw TrotterError("non-finite gate angle");
    auto& g = c_.gates;
    if (merge_ == Merge::adjacent && !g.empty() && g.back().gen == gen) {
      g.back().angle += angle;
      return;
    }
    if (merge_ == Merge::step) {
      SupportSet sup = gen.support();
      for (size_t i = g.size(); i-- > 0;) {
        if (g[i].step != step) break;
        if (g[i].gen == gen) {
          g[i].angle += angle;
          return;
        }
        if (intersects(g[i].support, sup) && !commutes(g[i].gen, gen)) break;
      }
      g.push_back({gen, angle, step, std::move(sup)});
      return;
    }
    g.push_back({gen, angle, step, gen.support()});
  }

  Circuit take() { return std::move(c_); }

 private:
  Merge merge_;
  Circuit c_;
};

inline void check_steps(double t, int r) {
  if (r < 1) throw TrotterError("step count must be >= 1");
  if (!std::isfinite(t)) throw TrotterError("time must be finite");
}

inline Circuit standard_formula(const std::vector<PauliSum>& parts, double t, int r, int p,
                                Merge merge = Merge::adjacent) {
  if (parts.empty()) throw TrotterError("empty decomposition");
  check_steps(t, r);
  auto s = suzuki_schedule(p);
  int n = 0;
  for (auto& q : parts) n = std::max(n, q.n());
  CircuitBuilder b(n, merge);
  double tau = t / r;
  int G = static_cast<int>(parts.size());
  for (int j = 0; j < r; ++j)
    for (int st = 0; st < s.stages; ++st)
      for (int k = 0; k < G; ++k) {
        int slot = SuzukiSchedule::forward(st) ? k : G - 1 - k;
        b.push(parts[slot], tau * s.a(st, slot), j);
      }
  return b.take();
}

// Even-odd order of indices 0..cap: evens then odds on odd stages (1-based),
// odds then evens on even stages.
inline std::vector<int> even_odd_order(int cap, int stage_1based) {
  std::vector<int> ev, od;
  for (int k = 0; k <= cap; ++k) (k % 2 == 0 ? ev : od).push_back(k);
  std::vector<int> out;
  auto& first = stage_1based % 2 == 1 ? ev : od;
  auto& second = stage_1based % 2 == 1 ? od : ev;
  out.insert(out.end(), first.begin(), first.end());
  out.insert(out.end(), second.begin(), second.end());
  return out;
}

inline Circuit reduced_formula(const InteractiveDecomposition& d, double t, int r, int p,
                               Merge merge = Merge::adjacent) {
  check_steps(t, r);
  auto s = suzuki_schedule(p);
  CircuitBuilder b(d.n, merge);
  double tau = t / r;
  int G = d.gamma0();
  for (int j = 1; j <= r; ++j)
    for (int v = 1; v <= s.stages; ++v) {
      int cap = std::min(v + (j - 1) * s.stages, G);
      for (int k : even_odd_order(cap, v)) b.push(d.subs[k], tau * s.a(v - 1, k), j - 1);
    }
  return b.take();
}

inline Circuit reduced_formula(const PauliSum& h, const SupportSet& S, double t, int r, int p,
                               Merge merge = Merge::adjacent) {
  if (S.empty()) throw TrotterError("observable support must be nonempty");
  return reduced_formula(edge_sets(h, S), t, r, p, merge);
}

// Step j runs the full even-odd formula over H_0..H_{jY} plus one tail
// sub-Hamiltonian at index jY+1.
inline Circuit virtual_formula(const InteractiveDecomposition& d, double t, int r, int p,
                               Merge merge = Merge::none) {
  check_steps(t, r);
  auto s = suzuki_schedule(p);
  CircuitBuilder b(d.n, merge);
  double tau = t / r;
  for (int j = 1; j <= r; ++j) {
    auto parts = d.truncated(j * s.stages);
    int cap = static_cast<int>(parts.size()) - 1;
    for (int v = 1; v <= s.stages; ++v)
      for (int k : even_odd_order(cap, v)) b.push(parts[k], tau * s.a(v - 1, k), j - 1);
  }
  return b.take();
}

inline Circuit chromatic_formula(const InteractionHypergraph& g, const Coloring& col, double t,
                                 int r, int p, Merge merge = Merge::adjacent) {
  if (!valid_coloring(g, col)) throw TrotterError("invalid coloring");
  check_steps(t, r);
  auto s = suzuki_schedule(p);
  CircuitBuilder b(g.n, merge);
  double tau = t / r;
  for (int j = 0; j < r; ++j)
    for (int st = 0; st < s.stages; ++st) {
      bool fwd = SuzukiSchedule::forward(st);
      for (int ci = 0; ci < col.chi; ++ci) {
        int c = fwd ? ci + 1 : col.chi - ci;
        for (int e = 0; e < g.size(); ++e) {
          int idx = fwd ? e : g.size() - 1 - e;
          if (col.color[idx] == c) b.push(g.parts[idx], tau * s.a(st, idx), j);
        }
      }
    }
  return b.take();
}

enum class Granularity { generator_exponentials, pauli_exponentials };

inline long gate_count(const Circuit& c, Granularity g = Granularity::pauli_exponentials) {
  if (g == Granularity::generator_exponentials) return static_cast<long>(c.gates.size());
  long s = 0;
  for (auto& gate : c.gates) s += static_cast<long>(gate.gen.size());
  return s;
}

inline Circuit inverse(const Circuit& c) {
  Circuit out;
  out.n = c.n;
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
    Gate g = *it;
    g.angle = -g.angle;
    out.gates.push_back(std::move(g));
  }
  return out;
}

inline std::vector<SupportSet> gate_supports(const Circuit& c) {
  std::vector<SupportSet> out;
  for (auto& g : c.gates) out.push_back(g.support);
  return out;
}

inline nlohmann::json to_json(const Circuit& c) {
  nlohmann::json gates = nlohmann::json::array();
  for (auto& g : c.gates) {
    nlohmann::json terms = nlohmann::json::array();
    for (auto& [p, v] : g.gen.terms()) terms.push_back({{"pauli", p.str()}, {"coeff", v}});
    gates.push_back({{"angle", g.angle}, {"step", g.step}, {"generator", terms}});
  }
  return {{"n", c.n}, {"gates", gates}};
}

}  // namespace tlc
