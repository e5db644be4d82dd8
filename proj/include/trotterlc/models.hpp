#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pauli.hpp"

namespace tlc {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Open chain builders. periodic adds the (n-1, 0) bond.
inline PauliSum build_mfi(int n, double J, double h, double g, bool periodic = false) {
  if (n < 2) throw ModelError("mfi needs n >= 2");
  PauliSum out(n);
  int bonds = periodic && n > 2 ? n : n - 1;
  for (int j = 0; j < bonds; ++j)
    out.add(PauliString::sites(n, {{j, 'X'}, {(j + 1) % n, 'X'}}), J);
  for (int j = 0; j < n; ++j) out.add(PauliString::sites(n, {{j, 'X'}}), h);
  for (int j = 0; j < n; ++j) out.add(PauliString::sites(n, {{j, 'Y'}}), g);
  return out;
}

inline PauliSum build_tfi(int n, double J, double h, bool periodic = false) {
  if (n < 2) throw ModelError("tfi needs n >= 2");
  PauliSum out(n);
  int bonds = periodic && n > 2 ? n : n - 1;
  for (int j = 0; j < bonds; ++j)
    out.add(PauliString::sites(n, {{j, 'Z'}, {(j + 1) % n, 'Z'}}), J);
  for (int j = 0; j < n; ++j) out.add(PauliString::sites(n, {{j, 'X'}}), h);
  return out;
}

inline PauliSum build_power_law(int n, double J, double h, double alpha) {
  if (n < 2) throw ModelError("power-law needs n >= 2");
  if (!(alpha > 0)) throw ModelError("power-law needs alpha > 0");
  PauliSum out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double c = J / std::pow(static_cast<double>(j - i), alpha);
      for (char p : {'X', 'Y', 'Z'}) out.add(PauliString::sites(n, {{i, p}, {j, p}}), c);
    }
  for (int j = 0; j < n; ++j) out.add(PauliString::sites(n, {{j, 'X'}}), h);
  return out;
}

struct LatticeSpec {
  std::vector<int> extents;

  int dim() const { return static_cast<int>(extents.size()); }
  int sites() const {
    int s = 1;
    for (int e : extents) s *= e;
    return s;
  }
  std::vector<int> coords(int site) const {
    std::vector<int> c(extents.size());
    for (int a = dim() - 1; a >= 0; --a) {
      c[a] = site % extents[a];
      site /= extents[a];
    }
    return c;
  }
  int index(const std::vector<int>& c) const {
    int s = 0;
    for (int a = 0; a < dim(); ++a) s = s * extents[a] + c[a];
    return s;
  }
  double distance(int i, int j) const {
    auto a = coords(i), b = coords(j);
    double s = 0;
    for (int k = 0; k < dim(); ++k) s += double(a[k] - b[k]) * double(a[k] - b[k]);
    return std::sqrt(s);
  }
  // Nearest-neighbour pairs (i < j) with the axis they run along.
  std::vector<std::pair<std::pair<int, int>, int>> edges() const {
    std::vector<std::pair<std::pair<int, int>, int>> out;
    for (int i = 0; i < sites(); ++i) {
      auto c = coords(i);
      for (int a = 0; a < dim(); ++a) {
        if (c[a] + 1 >= extents[a]) continue;
        auto d = c;
        ++d[a];
        out.push_back({{i, index(d)}, a});
      }
    }
    return out;
  }
  static LatticeSpec chain(int n) { return LatticeSpec{{n}}; }
};

inline void validate(const LatticeSpec& spec) {
  if (spec.extents.empty()) throw ModelError("lattice needs D >= 1");
  for (int e : spec.extents)
    if (e < 1) throw ModelError("lattice extents must be positive");
}

inline PauliSum place(const PauliString& word, const std::vector<int>& sites, int n) {
  PauliString out(n);
  for (int q = 0; q < word.n(); ++q) out.set(sites[q], word.x(q), word.z(q));
  return PauliSum(out, 1.0);
}

// Instantiates a two-site template on every nearest-neighbour edge.
inline PauliSum build_nn_lattice(const LatticeSpec& spec, const PauliSum& tmpl) {
  validate(spec);
  if (tmpl.n() != 2 || tmpl.support() != SupportSet{0, 1})
    throw ModelError("edge template must act on exactly 2 sites");
  int n = spec.sites();
  PauliSum out(n);
  for (auto& [e, axis] : spec.edges())
    for (auto& [p, c] : tmpl.terms()) out += c * place(p, {e.first, e.second}, n);
  return out;
}

inline PauliSum parse_pauli_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("terms"))
    throw ModelError("JSON Hamiltonian needs 'n' and 'terms'");
  int n = j.at("n").get<int>();
  PauliSum out(n);
  int idx = 0;
  for (auto& t : j.at("terms")) {
    auto word = t.at("pauli").get<std::string>();
    if (static_cast<int>(word.size()) != n)
      throw ModelError("term " + std::to_string(idx) + ": word length " +
                       std::to_string(word.size()) + " differs from n=" + std::to_string(n));
    out.add(PauliString::from_string(word), t.at("coeff").get<double>());
    ++idx;
  }
  return out;
}

inline nlohmann::json to_json(const PauliSum& a) {
  nlohmann::json terms = nlohmann::json::array();
  for (auto& [p, c] : a.terms()) terms.push_back({{"pauli", p.str()}, {"coeff", c}});
  return {{"n", a.n()}, {"terms", terms}};
}

inline PauliSum load_pauli_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string body = ss.str();
  auto first = body.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && body[first] == '{') {
    try {
      return parse_pauli_json(nlohmann::json::parse(body));
    } catch (const nlohmann::json::exception& e) {
      throw ModelError(path + ": " + e.what());
    }
  }
  try {
    return parse_pauli_text(body);
  } catch (const PauliError& e) {
    throw ModelError(path + ": " + e.what());
  }
}

// Greedy partition into mutually commuting groups, visiting terms in word order.
inline std::vector<PauliSum> group_commuting(const PauliSum& h) {
  std::vector<PauliSum> groups;
  for (auto& [p, c] : h.terms()) {
    bool placed = false;
    for (auto& g : groups) {
      bool ok = true;
      for (auto& [q, d] : g.terms())
        if (!commutes(p, q)) { ok = false; break; }
      if (ok) {
        g.add(p, c);
        placed = true;
        break;
      }
    }
    if (!placed) groups.emplace_back(p, c);
  }
  return groups;
}

// Largest lattice distance between two sites of the word.
inline double term_diameter(const PauliString& p, const LatticeSpec& lat) {
  auto sup = p.support();
  std::vector<int> s(sup.begin(), sup.end());
  double d = 0;
  for (size_t i = 0; i < s.size(); ++i)
    for (size_t j = i + 1; j < s.size(); ++j) d = std::max(d, lat.distance(s[i], s[j]));
  return d;
}

struct InnerRegion {
  SupportSet sites;
  double radius = 0;
};

struct Truncation {
  PauliSum kept;
  PauliSum removed;
  double removed_one_norm = 0;
};

// Without inner: drop every term longer than d0. With inner: drop only the
// long terms that touch {j : d(j, sites) <= radius}.
inline Truncation truncate_power_law(const PauliSum& h, const LatticeSpec& lat, double d0,
                                     const std::optional<InnerRegion>& inner = std::nullopt) {
  if (!(d0 > 0)) throw ModelError("truncation distance must be positive");
  if (lat.sites() != h.n()) throw ModelError("lattice size differs from Hamiltonian size");
  SupportSet region;
  if (inner) {
    for (int j = 0; j < lat.sites(); ++j)
      for (int s : inner->sites)
        if (lat.distance(j, s) <= inner->radius + 1e-12) { region.insert(j); break; }
  }
  Truncation out{PauliSum(h.n()), PauliSum(h.n()), 0.0};
  for (auto& [p, c] : h.terms()) {
    bool longer = term_diameter(p, lat) > d0 + 1e-12;
    bool drop = longer && (!inner || intersects(p.support(), region));
    (drop ? out.removed : out.kept).add(p, c);
  }
  out.removed_one_norm = one_norm(out.removed);
  return out;
}

// Common observables.
inline PauliSum z_on(int n, int q) { return PauliSum(PauliString::sites(n, {{q, 'Z'}}), 1.0); }

inline PauliSum sum_z(int n, double scale = 1.0) {
  PauliSum out(n);
  for (int j = 0; j < n; ++j) out.add(PauliString::sites(n, {{j, 'Z'}}), scale);
  return out;
}

inline PauliSum mean_zz(int n) {
  PauliSum out(n);
  for (int j = 0; j + 1 < n; ++j)
    out.add(PauliString::sites(n, {{j, 'Z'}, {j + 1, 'Z'}}), 1.0 / (n - 1));
  return out;
}

// Product of |0><0| projectors on qubits 0..k-1, expanded as prod (I+Z_j)/2.
inline PauliSum zero_projector(int n, int k) {
  if (k < 1 || k > n) throw ModelError("projector size must be in [1, n]");
  PauliSum out(n);
  double c = std::ldexp(1.0, -k);
  for (uint64_t m = 0; m < (uint64_t{1} << k); ++m) {
    PauliString p(n);
    for (int j = 0; j < k; ++j)
      if ((m >> j) & 1u) p.set(j, false, true);
    out.add(p, c);
  }
  return out;
}

// "J=1,h=0.5" style parameter lists.
inline std::map<std::string, double> parse_params(const std::string& s) {
  std::map<std::string, double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ModelError("bad parameter '" + item + "'");
    auto key = item.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    try {
      out[key] = std::stod(item.substr(eq + 1));
    } catch (...) {
      throw ModelError("bad value in '" + item + "'");
    }
  }
  return out;
}

}  // namespace tlc
