#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dense.hpp"
#include "lightcone.hpp"
#include "pauli.hpp"
#include "trotter.hpp"

namespace tlc {

class BoundError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BoundReport {
  std::string name;
  double value = 0;
  double t = 0;
  int r = 1;
  int p = 2;
  int n = 0;
  std::string norm_mode;
  // Named pieces that add up to value.
  std::map<std::string, double> components;
  // Side quantities reported alongside (not part of the sum).
  std::map<std::string, double> extras;
};

inline nlohmann::json to_json(const BoundReport& b) {
  return {{"name", b.name},   {"value", b.value},           {"t", b.t},
          {"r", b.r},         {"p", b.p},                   {"n", b.n},
          {"norm_mode", b.norm_mode}, {"components", b.components}, {"extras", b.extras}};
}

using NormFn = std::function<double(const PauliSum&)>;

// Sums over g1 of N([R,[R,H_g1]]) and N([H_g1,[H_g1,R]]), R = sum of later parts.
struct NestedSums {
  double outer = 0;
  double inner = 0;
};

inline NestedSums nested_sums(const std::vector<PauliSum>& parts, const NormFn& norm) {
  NestedSums s;
  int G = static_cast<int>(parts.size());
  if (G < 2) return s;
  int n = 0;
  for (auto& p : parts) n = std::max(n, p.n());
  std::vector<PauliSum> suffix(G + 1, PauliSum(n));
  for (int g = G - 1; g >= 0; --g) suffix[g] = suffix[g + 1] + parts[g];
  for (int g = 0; g + 1 < G; ++g) {
    const PauliSum& R = suffix[g + 1];
    if (R.empty() || parts[g].empty()) continue;
    PauliSum c = commutator(R, parts[g]);
    if (c.empty()) continue;
    s.outer += norm(commutator(R, c));
    s.inner += norm(commutator(parts[g], commutator(parts[g], R)));
  }
  return s;
}

inline NormFn op_norm_fn(NormMode mode, int limit) {
  return [mode, limit](const PauliSum& a) { return operator_norm(a, mode, limit); };
}

inline void check_r(int r) {
  if (r < 1) throw BoundError("step count must be >= 1");
}

inline BoundReport worst_case_p2_bound(const std::vector<PauliSum>& parts, double o_norm,
                                       double t, int r, NormMode mode,
                                       int limit = kDefaultDenseLimit) {
  check_r(r);
  int n = 0;
  for (auto& p : parts) n = std::max(n, p.n());
  if (mode == NormMode::dense) check_dense(n, limit);
  auto s = nested_sums(parts, op_norm_fn(mode, limit));
  double pre = std::pow(t, 3) * o_norm / (6.0 * r * r);
  BoundReport b{"worst", 0, t, r, 2, n, to_string(mode), {}, {}};
  b.components["outer"] = pre * s.outer;
  b.components["inner"] = pre * 0.5 * s.inner;
  b.value = b.components["outer"] + b.components["inner"];
  b.extras["o_norm"] = o_norm;
  b.extras["parts"] = static_cast<double>(parts.size());
  return b;
}

// Parts used by the single-observable light-cone bound: H_0 .. H_{2r} plus
// the remaining terms as one tail at index 2r+1.
inline std::vector<PauliSum> thm1_parts(const PauliSum& h, const SupportSet& S, int r) {
  int upsilon = suzuki_schedule(2).stages;
  return edge_sets(h, S).truncated(r * upsilon);
}

inline BoundReport thm1_bound(const PauliSum& h, const SupportSet& S, double o_norm, double t,
                              int r, NormMode mode, int limit = kDefaultDenseLimit) {
  check_r(r);
  auto parts = thm1_parts(h, S, r);
  auto b = worst_case_p2_bound(parts, o_norm, t, r, mode, limit);
  b.name = "thm1";
  b.n = h.n();
  return b;
}

// Colour-restricted parts for one summand: colours 1..chi restricted to
// hyperedges meeting the first r(chi-1)Y+1 edge sets, then the rest.
inline std::vector<PauliSum> thm2_parts(const PauliSum& h, const SupportSet& S,
                                        const InteractionHypergraph& g, const Coloring& col,
                                        int r) {
  int upsilon = suzuki_schedule(2).stages;
  int K = r * (col.chi - 1) * upsilon + 1;
  SupportSet cone = edge_sets(h, S, K).cone(K);
  std::vector<PauliSum> parts(col.chi, PauliSum(h.n()));
  PauliSum used(h.n());
  for (int i = 0; i < g.size(); ++i)
    if (intersects(g.edges[i], cone)) {
      parts[col.color[i] - 1] += g.parts[i];
      used += g.parts[i];
    }
  PauliSum rest = h - used;
  if (!rest.empty()) parts.push_back(rest);
  return parts;
}

inline BoundReport thm2_bound(const PauliSum& h, const std::vector<PauliSum>& summands,
                              const InteractionHypergraph& g, const Coloring& col, double t,
                              int r, NormMode mode, int limit = kDefaultDenseLimit) {
  check_r(r);
  if (!valid_coloring(g, col)) throw BoundError("invalid coloring");
  BoundReport b{"thm2", 0, t, r, 2, h.n(), to_string(mode), {}, {}};
  auto norm = op_norm_fn(mode, limit);
  double pre = std::pow(t, 3) / (6.0 * r * r);
  for (size_t m = 0; m < summands.size(); ++m) {
    auto S = summands[m].support();
    double v = 0;
    if (!S.empty()) {
      auto s = nested_sums(thm2_parts(h, S, g, col, r), norm);
      v = norm(summands[m]) * pre * (s.outer + 0.5 * s.inner);
    }
    b.components["m" + std::to_string(m)] = v;
    b.value += v;
  }
  return b;
}

enum class Rand2Style { triangle_p2, nested_T2 };

inline constexpr size_t kDefaultTupleBudget = 2'000'000;

// Sum over all (g1, g2, g3) of the normalized 2-norm of [H_g3,[H_g2,H_g1]].
inline double t2_sum(const std::vector<PauliSum>& parts, size_t budget = kDefaultTupleBudget) {
  size_t G = parts.size();
  if (G * G * G > budget)
    throw BoundError("T2 needs " + std::to_string(G * G * G) + " nested commutators, budget is " +
                     std::to_string(budget));
  double s = 0;
  for (size_t g1 = 0; g1 < G; ++g1)
    for (size_t g2 = 0; g2 < G; ++g2) {
      PauliSum c = commutator(parts[g2], parts[g1]);
      if (c.empty()) continue;
      for (size_t g3 = 0; g3 < G; ++g3) s += normalized_two_norm(commutator(parts[g3], c));
    }
  return s;
}

inline BoundReport random_2design_bound(const std::vector<PauliSum>& parts, const PauliSum& o,
                                        double t, int r, int p = 2,
                                        Rand2Style style = Rand2Style::triangle_p2,
                                        size_t budget = kDefaultTupleBudget) {
  check_r(r);
  if (p != 2) throw BoundError("explicit random-input constants exist only for p = 2");
  int n = o.n();
  double o2 = normalized_two_norm(o);
  double tau = t / r;
  BoundReport b{"rand2", 0, t, r, p, n, "schatten-2", {}, {}};
  double m2;
  if (style == Rand2Style::triangle_p2) {
    auto s = nested_sums(parts, [](const PauliSum& a) { return normalized_two_norm(a); });
    double pre = std::sqrt(2.0) * o2 * std::pow(t, 3) / (12.0 * r * r);
    b.components["outer"] = pre * s.outer;
    b.components["inner"] = pre * 0.5 * s.inner;
    b.value = b.components["outer"] + b.components["inner"];
    m2 = std::pow(tau, 3) / 12.0 * s.outer + std::pow(tau, 3) / 24.0 * s.inner;
  } else {
    // Each triangle term is one tuple of T2, so tau^3/12 * T2 bounds |M|_2/sqrt(d).
    double T2 = t2_sum(parts, budget);
    b.name = "rand2_t2";
    b.value = std::sqrt(2.0) * o2 * std::pow(t, 3) / (12.0 * r * r) * T2;
    b.components["t2"] = b.value;
    b.extras["T2"] = T2;
    m2 = std::pow(tau, 3) / 12.0 * T2;
  }
  double d = std::ldexp(1.0, n);
  // 2 r^2 |O|_2^2 |M|_2^2 / (d(d+1)) written with normalized norms.
  b.extras["variance_bound"] = 2.0 * r * r * o2 * o2 * m2 * m2 * d / (d + 1.0);
  b.extras["o_two_norm"] = o2;
  b.extras["m_two_norm"] = m2;
  return b;
}

inline BoundReport random_bound_no_observable(const std::vector<PauliSum>& parts,
                                              double o_opnorm, double t, int r) {
  check_r(r);
  int n = 0;
  for (auto& p : parts) n = std::max(n, p.n());
  auto s = nested_sums(parts, [](const PauliSum& a) { return normalized_two_norm(a); });
  double pre = std::pow(t, 3) * o_opnorm / (6.0 * r * r);
  BoundReport b{"rand_noobs", 0, t, r, 2, n, "schatten-2", {}, {}};
  b.components["outer"] = pre * s.outer;
  b.components["inner"] = pre * 0.5 * s.inner;
  b.value = b.components["outer"] + b.components["inner"];
  return b;
}

inline BoundReport random_1design_bound(const std::vector<PauliSum>& parts, const PauliSum& o,
                                        double t, int r,
                                        size_t budget = kDefaultFourNormBudget) {
  check_r(r);
  double o4 = normalized_four_norm(o, budget);
  auto s = nested_sums(parts, [budget](const PauliSum& a) {
    return normalized_four_norm(a, budget);
  });
  double pre = std::pow(t, 3) * o4 / (6.0 * r * r);
  BoundReport b{"rand1", 0, t, r, 2, o.n(), "schatten-4", {}, {}};
  b.components["outer"] = pre * s.outer;
  b.components["inner"] = pre * 0.5 * s.inner;
  b.value = b.components["outer"] + b.components["inner"];
  double tau = t / r;
  double a4 = std::pow(tau, 3) / 12.0 * s.outer + std::pow(tau, 3) / 24.0 * s.inner;
  b.extras["variance_bound"] = 4.0 * r * r * a4 * a4 * o4 * o4;
  b.extras["o_four_norm"] = o4;
  return b;
}

enum class TruncVariant { lc, trc };

struct TruncExtras {
  double sum_o_norms = 1;  // sum_m |O_m|
  int D = 1;
  double alpha = 4;
  double d0 = 1;
  int n = 1;
  double constant = 1;
};

inline BoundReport truncation_bound(double removed_one_norm, double t, TruncVariant v,
                                    const TruncExtras& x = {}) {
  BoundReport b{v == TruncVariant::lc ? "trunc_lc" : "trunc_trc", 0, t, 0, 0, x.n,
                "one-norm", {}, {}};
  if (v == TruncVariant::lc) {
    b.value = removed_one_norm * t;
  } else if (removed_one_norm > 0) {
    double logs = std::pow(std::log(std::max(2, x.n)), x.D);
    b.value = x.constant * (std::pow(t, x.D + 1) + t * logs) * x.sum_o_norms /
              std::pow(x.d0, x.alpha - 2.0 * x.D);
  }
  b.components["truncation"] = b.value;
  b.extras["constant"] = v == TruncVariant::lc ? 1.0 : x.constant;
  b.extras["removed_one_norm"] = removed_one_norm;
  return b;
}

// Smallest r <= r_max with bound(r) <= eps, or nullopt.
inline std::optional<int> steps_for_epsilon(const std::function<double(int)>& bound,
                                            double eps, int r_max = 1 << 20) {
  if (!(eps > 0)) throw BoundError("epsilon must be positive");
  double prev = bound(1);
  if (prev <= eps) return 1;
  int lo = 1, hi = 2;
  for (;;) {
    if (hi > r_max) hi = r_max;
    double v = bound(hi);
    if (v > prev * (1 + 1e-12) + 1e-300)
      throw BoundError("bound increased from r=" + std::to_string(lo) + " to r=" +
                       std::to_string(hi));
    if (v <= eps) break;
    if (hi == r_max) return std::nullopt;
    lo = hi;
    prev = v;
    hi = hi > r_max / 2 ? r_max : hi * 2;
  }
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if (bound(mid) <= eps) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace tlc
