#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "models.hpp"
#include "pauli.hpp"

namespace tlc {

class LightconeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// H = subs[0] + ... + subs[G] + tail, with subs[k] supported on edges[k-1] | edges[k].
struct InteractiveDecomposition {
  int n = 0;
  SupportSet base;
  std::vector<PauliSum> subs;
  std::vector<SupportSet> edges;
  // Terms never reached, or left over after an early stop.
  PauliSum tail;

  int gamma0() const { return static_cast<int>(subs.size()) - 1; }

  SupportSet cone(int k) const {
    SupportSet s;
    for (int i = 0; i <= k && i < static_cast<int>(edges.size()); ++i)
      s.insert(edges[i].begin(), edges[i].end());
    return s;
  }

  // subs[0..k] plus one part holding everything else (omitted if empty).
  std::vector<PauliSum> truncated(int k) const {
    std::vector<PauliSum> out;
    PauliSum rest = tail;
    for (int i = 0; i < static_cast<int>(subs.size()); ++i) {
      if (i <= k) out.push_back(subs[i]); else rest += subs[i];
    }
    if (!rest.empty()) out.push_back(rest);
    return out;
  }
};

inline InteractiveDecomposition edge_sets(const PauliSum& h, const SupportSet& S,
                                          std::optional<int> max_k = std::nullopt) {
  if (S.empty()) throw LightconeError("support set must be nonempty");
  if (*S.rbegin() >= h.n() || *S.begin() < 0)
    throw LightconeError("support set outside [0, n)");
  InteractiveDecomposition d;
  d.n = h.n();
  d.base = S;
  std::vector<std::pair<PauliString, double>> left;
  PauliSum h0(h.n());
  for (auto& [p, c] : h.terms()) {
    if (is_subset(p.support(), S)) h0.add(p, c); else left.emplace_back(p, c);
  }
  d.subs.push_back(h0);
  d.edges.push_back(S);
  while (!left.empty() && (!max_k || static_cast<int>(d.subs.size()) <= *max_k)) {
    const SupportSet& prev = d.edges.back();
    PauliSum hk(h.n());
    std::vector<std::pair<PauliString, double>> rest;
    for (auto& t : left) {
      if (intersects(t.first.support(), prev)) hk.add(t.first, t.second);
      else rest.push_back(t);
    }
    if (hk.empty()) break;
    d.edges.push_back(set_minus(hk.support(), prev));
    d.subs.push_back(hk);
    left.swap(rest);
  }
  d.tail = PauliSum(h.n());
  for (auto& t : left) d.tail.add(t.first, t.second);
  return d;
}

// Folds U (+) S over unitary supports in application order.
inline SupportSet propagate(const std::vector<SupportSet>& unitary_supports, SupportSet S) {
  for (auto& u : unitary_supports)
    if (intersects(u, S)) S.insert(u.begin(), u.end());
  return S;
}

struct InteractionHypergraph {
  int n = 0;
  std::vector<SupportSet> edges;
  std::vector<PauliSum> parts;

  int size() const { return static_cast<int>(edges.size()); }
};

inline InteractionHypergraph build_hypergraph(const PauliSum& h) {
  std::set<SupportSet> supports;
  for (auto& [p, c] : h.terms())
    if (!p.is_identity()) supports.insert(p.support());
  InteractionHypergraph g;
  g.n = h.n();
  for (auto& s : supports) {
    bool dominated = false;
    for (auto& o : supports)
      if (o != s && is_subset(s, o)) { dominated = true; break; }
    if (!dominated) g.edges.push_back(s);
  }
  g.parts.assign(g.edges.size(), PauliSum(h.n()));
  for (auto& [p, c] : h.terms()) {
    auto ps = p.support();
    for (size_t i = 0; i < g.edges.size(); ++i)
      if (is_subset(ps, g.edges[i])) { g.parts[i].add(p, c); break; }
  }
  return g;
}

struct Coloring {
  std::vector<int> color;  // 1-based, per hyperedge
  int chi = 0;
};

inline bool valid_coloring(const InteractionHypergraph& g, const Coloring& c) {
  if (static_cast<int>(c.color.size()) != g.size()) return false;
  for (int i = 0; i < g.size(); ++i) {
    if (c.color[i] < 1 || c.color[i] > c.chi) return false;
    for (int j = i + 1; j < g.size(); ++j)
      if (c.color[i] == c.color[j] && intersects(g.edges[i], g.edges[j])) return false;
  }
  return true;
}

enum class ColorStrategy { greedy, lattice_parity };

inline Coloring color_greedy(const InteractionHypergraph& g) {
  std::vector<int> order(g.size());
  for (int i = 0; i < g.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (g.edges[a].size() != g.edges[b].size()) return g.edges[a].size() > g.edges[b].size();
    return g.edges[a] < g.edges[b];
  });
  Coloring c;
  c.color.assign(g.size(), 0);
  for (int i : order) {
    for (int col = 1;; ++col) {
      bool ok = true;
      for (int j = 0; j < g.size() && ok; ++j)
        if (c.color[j] == col && intersects(g.edges[i], g.edges[j])) ok = false;
      if (ok) {
        c.color[i] = col;
        c.chi = std::max(c.chi, col);
        break;
      }
    }
  }
  return c;
}

// Colour (axis, parity of the lower endpoint along that axis); chi = 2D.
inline Coloring color_lattice_parity(const InteractionHypergraph& g, const LatticeSpec& lat) {
  if (lat.sites() != g.n) throw LightconeError("lattice size differs from hypergraph size");
  Coloring c;
  c.chi = 2 * lat.dim();
  for (auto& e : g.edges) {
    if (e.size() != 2) throw LightconeError("lattice_parity needs two-site hyperedges");
    int a = *e.begin(), b = *e.rbegin();
    auto ca = lat.coords(a), cb = lat.coords(b);
    int axis = -1;
    for (int k = 0; k < lat.dim(); ++k) {
      int diff = cb[k] - ca[k];
      if (diff == 0) continue;
      if (std::abs(diff) != 1 || axis >= 0) {
        axis = -2;
        break;
      }
      axis = k;
    }
    if (axis < 0) throw LightconeError("hyperedge is not a nearest-neighbour lattice pair");
    int lo = std::min(ca[axis], cb[axis]);
    c.color.push_back(2 * axis + (lo % 2) + 1);
  }
  return c;
}

inline Coloring color_hypergraph(const InteractionHypergraph& g, ColorStrategy s,
                                 const std::optional<LatticeSpec>& lat = std::nullopt) {
  if (s == ColorStrategy::greedy) return color_greedy(g);
  return color_lattice_parity(g, lat ? *lat : LatticeSpec::chain(g.n));
}

struct CubeRegrouping {
  InteractionHypergraph graph;
  Coloring coloring;
  int cubes = 0;
};

// Side-ceil(d0) cubes anchored at the origin; each group lives on a cube pair
// and pairs are coloured by (offset direction, parity along it).
inline CubeRegrouping cube_regroup(const PauliSum& h, const LatticeSpec& lat, double d0) {
  if (!(d0 > 0)) throw LightconeError("cube side must be positive");
  if (lat.sites() != h.n()) throw LightconeError("lattice size differs from Hamiltonian size");
  std::string offenders;
  for (auto& [p, c] : h.terms())
    if (term_diameter(p, lat) > d0 + 1e-12) offenders += " " + p.str();
  if (!offenders.empty()) throw LightconeError("terms longer than d0:" + offenders);

  int side = std::max(1, static_cast<int>(std::ceil(d0 - 1e-12)));
  int D = lat.dim();
  auto cube_of = [&](int site) {
    auto c = lat.coords(site);
    for (auto& x : c) x /= side;
    return c;
  };
  std::map<std::vector<int>, SupportSet> cube_sites;
  for (int s = 0; s < lat.sites(); ++s) cube_sites[cube_of(s)].insert(s);

  using Key = std::pair<std::vector<int>, std::vector<int>>;
  std::map<Key, PauliSum> groups;
  std::map<std::vector<int>, PauliSum> singles;
  for (auto& [p, c] : h.terms()) {
    std::set<std::vector<int>> touched;
    for (int s : p.support()) touched.insert(cube_of(s));
    if (touched.size() <= 1) {
      auto key = touched.empty() ? cube_of(0) : *touched.begin();
      singles.try_emplace(key, PauliSum(h.n())).first->second.add(p, c);
    } else if (touched.size() == 2) {
      Key k{*touched.begin(), *touched.rbegin()};
      groups.try_emplace(k, PauliSum(h.n())).first->second.add(p, c);
    } else {
      throw LightconeError("term " + p.str() + " spans more than two cubes");
    }
  }
  // Single-cube content joins the first pair containing that cube.
  for (auto& [cube, part] : singles) {
    bool placed = false;
    for (auto& [k, g] : groups)
      if (k.first == cube || k.second == cube) {
        g += part;
        placed = true;
        break;
      }
    if (!placed) groups[{cube, cube}] = part;
  }

  CubeRegrouping out;
  out.cubes = static_cast<int>(cube_sites.size());
  out.graph.n = h.n();
  std::map<std::pair<std::vector<int>, int>, int> class_ids;
  std::vector<std::pair<std::vector<int>, int>> classes;
  for (auto& [k, part] : groups) {
    SupportSet e = cube_sites[k.first];
    e.insert(cube_sites[k.second].begin(), cube_sites[k.second].end());
    out.graph.edges.push_back(e);
    out.graph.parts.push_back(part);
    std::vector<int> off(D);
    int parity = 0;
    for (int a = 0; a < D; ++a) off[a] = k.second[a] - k.first[a];
    for (int a = 0; a < D; ++a)
      if (off[a] != 0) {
        parity = ((k.first[a] % 2) + 2) % 2;
        break;
      }
    classes.push_back({off, parity});
  }
  std::vector<std::pair<std::vector<int>, int>> sorted_classes(classes);
  std::sort(sorted_classes.begin(), sorted_classes.end());
  sorted_classes.erase(std::unique(sorted_classes.begin(), sorted_classes.end()),
                       sorted_classes.end());
  for (size_t i = 0; i < sorted_classes.size(); ++i)
    class_ids[sorted_classes[i]] = static_cast<int>(i) + 1;
  for (auto& cl : classes) out.coloring.color.push_back(class_ids[cl]);
  out.coloring.chi = static_cast<int>(sorted_classes.size());
  return out;
}

}  // namespace tlc
