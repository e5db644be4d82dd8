#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "dense.hpp"
#include "pauli.hpp"
#include "trotter.hpp"

namespace tlc {

class SimError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Eigen::Index dim_of(int n) { return Eigen::Index{1} << n; }

// e^{iHt} via Hermitian eigendecomposition.
inline Mat exact_evolution(const PauliSum& h, double t, int limit = kDefaultDenseLimit) {
  check_dense(h.n(), limit);
  if (h.empty() || t == 0.0) return Mat::Identity(dim_of(h.n()), dim_of(h.n()));
  return expi_hermitian(materialize(h, limit), t);
}

// Precomputed action of one gate exp(i*angle*gen).
class GateKernel {
 public:
  GateKernel(const Gate& g, int n) : n_(n) {
    std::vector<PauliString> words;
    for (auto& [p, c] : g.gen.terms()) words.push_back(p);
    bool commuting = true;
    for (size_t i = 0; i < words.size() && commuting; ++i)
      for (size_t j = i + 1; j < words.size(); ++j)
        if (!commutes(words[i], words[j])) { commuting = false; break; }
    if (commuting) {
      for (auto& t : dense_terms(g.gen)) {
        double ph = g.angle * std::abs(t.coef);
        // t.coef = c * i^{x.z}; rotation uses the real coefficient c.
        cplx unit = t.coef / std::abs(t.coef);
        rot_.push_back({t.xb, t.zb, unit, std::cos(ph), std::sin(ph)});
      }
      return;
    }
    qubits_.assign(g.support.begin(), g.support.end());
    int s = static_cast<int>(qubits_.size());
    PauliSum local(s);
    for (auto& [p, c] : g.gen.terms()) {
      PauliString lp(s);
      for (int i = 0; i < s; ++i) lp.set(i, p.x(qubits_[i]), p.z(qubits_[i]));
      local.add(lp, c);
    }
    local_ = expi_hermitian(materialize(local, 30), g.angle);
    for (int i = 0; i < s; ++i) bitpos_.push_back(n_ - 1 - qubits_[i]);
  }

  // M <- g * M
  void apply(Mat& m) const {
    if (local_.size() == 0) {
      const Eigen::Index dim = m.rows();
      Mat pm(dim, m.cols());
      for (auto& r : rot_) {
        for (Eigen::Index b = 0; b < dim; ++b) {
          double s = (std::popcount(static_cast<uint64_t>(b) & r.zb) & 1) ? -1.0 : 1.0;
          pm.row(static_cast<Eigen::Index>(static_cast<uint64_t>(b) ^ r.xb)) =
              (r.unit * s) * m.row(b);
        }
        m = r.c * m + cplx(0, r.s) * pm;
      }
      return;
    }
    int s = static_cast<int>(bitpos_.size());
    const Eigen::Index dim = m.rows();
    const Eigen::Index ld = Eigen::Index{1} << s;
    uint64_t qmask = 0;
    for (int bp : bitpos_) qmask |= uint64_t{1} << bp;
    std::vector<Eigen::Index> idx(ld);
    Mat block(ld, m.cols());
    for (Eigen::Index base = 0; base < dim; ++base) {
      if (static_cast<uint64_t>(base) & qmask) continue;
      for (Eigen::Index l = 0; l < ld; ++l) {
        uint64_t b = static_cast<uint64_t>(base);
        for (int i = 0; i < s; ++i)
          if ((l >> (s - 1 - i)) & 1) b |= uint64_t{1} << bitpos_[i];
        idx[l] = static_cast<Eigen::Index>(b);
        block.row(l) = m.row(idx[l]);
      }
      Mat out = local_ * block;
      for (Eigen::Index l = 0; l < ld; ++l) m.row(idx[l]) = out.row(l);
    }
  }

 private:
  struct Rot {
    uint64_t xb, zb;
    cplx unit;
    double c, s;
  };
  int n_;
  std::vector<Rot> rot_;
  std::vector<int> qubits_;
  std::vector<int> bitpos_;
  Mat local_;
};

// Applies U = g_m ... g_1 to the columns of m.
inline void apply_circuit_to(const Circuit& c, Mat& m) {
  for (auto& g : c.gates) GateKernel(g, c.n).apply(m);
}

inline Mat apply_circuit(const Circuit& c, int limit = kDefaultDenseLimit) {
  check_dense(c.n, limit);
  Mat u = Mat::Identity(dim_of(c.n), dim_of(c.n));
  apply_circuit_to(c, u);
  return u;
}

inline Mat conjugate(const Mat& u, const Mat& o) { return u * o * u.adjoint(); }

inline double heisenberg_error(const PauliSum& h, const PauliSum& o, const Circuit& c, double t,
                               int limit = kDefaultDenseLimit) {
  check_dense(h.n(), limit);
  Mat om = materialize(o, limit);
  Mat ideal = conjugate(exact_evolution(h, t, limit), om);
  Mat approx = conjugate(apply_circuit(c, limit), om);
  Mat diff = ideal - approx;
  diff = 0.5 * (diff + diff.adjoint());
  return hermitian_spectral_norm(diff);
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Sample `index` of the stream `seed`; independent of evaluation order.
inline Vec sample_haar(int n, uint64_t seed, uint64_t index = 0, int limit = kDefaultDenseLimit) {
  check_dense(n, limit);
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ull)));
  std::normal_distribution<double> nd;
  Vec v(dim_of(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double re = nd(rng);
    double im = nd(rng);
    v(i) = cplx(re, im);
  }
  return v / v.norm();
}

struct ErrorSamples {
  double mean = 0;
  double stddev = 0;
  double variance = 0;
  std::vector<double> values;
};

inline ErrorSamples summarize(std::vector<double> v) {
  ErrorSamples s;
  s.values = std::move(v);
  double n = static_cast<double>(s.values.size());
  for (double x : s.values) s.mean += x;
  s.mean /= n;
  for (double x : s.values) s.variance += (x - s.mean) * (x - s.mean);
  s.variance /= (n - 1);
  s.stddev = std::sqrt(s.variance);
  return s;
}

inline ErrorSamples empirical_average_error(const PauliSum& h, const PauliSum& o,
                                            const Circuit& c, double t, int samples,
                                            uint64_t seed, int limit = kDefaultDenseLimit) {
  if (samples < 2) throw SimError("need at least 2 samples");
  check_dense(h.n(), limit);
  Mat om = materialize(o, limit);
  Mat delta = conjugate(exact_evolution(h, t, limit), om) - conjugate(apply_circuit(c, limit), om);
  std::vector<double> vals(samples);
  for (int i = 0; i < samples; ++i) {
    Vec psi = sample_haar(h.n(), seed, static_cast<uint64_t>(i), limit);
    vals[i] = std::abs(psi.dot(delta * psi));
  }
  return summarize(std::move(vals));
}

// e^{-iHt} psi by Lanczos propagation in short slices.
inline Vec evolve_state(const PauliSum& h, const Vec& psi, double t, int krylov = 40) {
  if (h.empty() || t == 0.0) return psi;
  auto terms = dense_terms(h);
  double scale = std::max(1.0, one_norm(h));
  int slices = std::max(1, static_cast<int>(std::ceil(std::abs(t) * scale / 4.0)));
  double dt = t / slices;
  Vec v = psi;
  const Eigen::Index dim = psi.size();
  int m = static_cast<int>(std::min<Eigen::Index>(dim, krylov));
  for (int sl = 0; sl < slices; ++sl) {
    double nrm = v.norm();
    std::vector<Vec> q{v / nrm};
    std::vector<double> a, b;
    for (int j = 0; j < m; ++j) {
      Vec w = Vec::Zero(dim);
      apply_terms(terms, q[j], w);
      a.push_back(std::real(q[j].dot(w)));
      for (int pass = 0; pass < 2; ++pass)
        for (auto& u : q) w -= u * u.dot(w);
      double bn = w.norm();
      if (j + 1 == m || bn < 1e-13) break;
      b.push_back(bn);
      q.push_back(w / bn);
    }
    int k = static_cast<int>(a.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      tri(i, i) = a[i];
      if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = b[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    Eigen::VectorXcd coef = Eigen::VectorXcd::Zero(k);
    for (int i = 0; i < k; ++i) {
      cplx ph = std::exp(cplx(0, -dt * es.eigenvalues()(i)));
      coef += ph * es.eigenvectors()(0, i) * es.eigenvectors().col(i).cast<cplx>();
    }
    Vec next = Vec::Zero(dim);
    for (int i = 0; i < k; ++i) next += coef(i) * q[i];
    v = nrm * next;
  }
  return v;
}

inline Vec basis_zero(int n) {
  Vec v = Vec::Zero(dim_of(n));
  v(0) = 1.0;
  return v;
}

struct RatePoint {
  double t = 0;
  double echo = 0;
  double lambda = 0;
  bool singular = false;
};

inline constexpr double kEchoFloor = 1e-12;

inline RatePoint rate_point(double t, double echo, int k) {
  RatePoint p;
  p.t = t;
  p.echo = echo;
  if (echo <= kEchoFloor) {
    p.singular = true;
    p.lambda = -std::log(kEchoFloor) / k;
  } else {
    p.lambda = -std::log(echo) / k + 0.0;  // no -0
  }
  return p;
}

inline double expectation(const PauliSum& o, const Vec& psi) {
  Vec w = Vec::Zero(psi.size());
  apply_terms(dense_terms(o), psi, w);
  return std::real(psi.dot(w));
}

// Local rate function of the echo <0|e^{iHt} prod_j P_j e^{-iHt}|0> for j < k.
// circuit_for(t) returns an approximation of e^{iHt}; without it the
// evolution is exact.
inline std::vector<RatePoint> rate_function(
    const PauliSum& h, int k, const std::vector<double>& t_grid,
    const std::function<Circuit(double)>& circuit_for = nullptr,
    int limit = kDefaultDenseLimit) {
  check_dense(h.n(), limit);
  if (k < 1 || k > h.n()) throw SimError("projector size must be in [1, n]");
  PauliSum proj = zero_projector(h.n(), k);
  std::vector<RatePoint> out;
  for (double t : t_grid) {
    Vec psi;
    if (circuit_for) {
      Mat st = basis_zero(h.n());
      apply_circuit_to(inverse(circuit_for(t)), st);
      psi = st.col(0);
    } else {
      psi = evolve_state(h, basis_zero(h.n()), t);
    }
    out.push_back(rate_point(t, expectation(proj, psi), k));
  }
  return out;
}

}  // namespace tlc
