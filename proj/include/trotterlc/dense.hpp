#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pauli.hpp"

namespace tlc {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr int kDefaultDenseLimit = 12;

class DenseLimitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void check_dense(int n, int limit) {
  if (n > limit || n > 30)
    throw DenseLimitError(std::to_string(n) + " qubits exceeds the dense limit of " +
                          std::to_string(limit) + "; use one-norm mode instead");
}

// Qubit q lives at bit (n-1-q) of the basis index, so qubit 0 is the
// leftmost Kronecker factor.
struct DenseTerm {
  uint64_t xb = 0;
  uint64_t zb = 0;
  cplx coef;
};

inline uint64_t basis_mask(const std::vector<uint64_t>& w, int n) {
  uint64_t m = 0;
  for (int q = 0; q < n; ++q)
    if ((w[q >> 6] >> (q & 63)) & 1u) m |= uint64_t{1} << (n - 1 - q);
  return m;
}

inline std::vector<DenseTerm> dense_terms(const PauliSum& a) {
  static const cplx ik[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::vector<DenseTerm> out;
  out.reserve(a.size());
  int n = a.n();
  for (auto& [p, c] : a.terms()) {
    DenseTerm t;
    t.xb = basis_mask(p.xw(), n);
    t.zb = basis_mask(p.zw(), n);
    t.coef = c * ik[std::popcount(t.xb & t.zb) & 3];
    out.push_back(t);
  }
  return out;
}

// out += A * in, column by column.
template <class In, class Out>
void apply_terms(const std::vector<DenseTerm>& terms, const In& in, Out& out) {
  const Eigen::Index dim = in.rows();
  for (auto& t : terms) {
    for (Eigen::Index col = 0; col < in.cols(); ++col) {
      for (Eigen::Index b = 0; b < dim; ++b) {
        double s = (std::popcount(static_cast<uint64_t>(b) & t.zb) & 1) ? -1.0 : 1.0;
        out(static_cast<Eigen::Index>(static_cast<uint64_t>(b) ^ t.xb), col) +=
            t.coef * s * in(b, col);
      }
    }
  }
}

inline Mat materialize(const PauliSum& a, int limit = kDefaultDenseLimit) {
  check_dense(a.n(), limit);
  const Eigen::Index dim = Eigen::Index{1} << a.n();
  Mat m = Mat::Zero(dim, dim);
  for (auto& t : dense_terms(a))
    for (Eigen::Index b = 0; b < dim; ++b) {
      double s = (std::popcount(static_cast<uint64_t>(b) & t.zb) & 1) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(static_cast<uint64_t>(b) ^ t.xb), b) += t.coef * s;
    }
  return m;
}

inline double hermitian_spectral_norm(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return std::max(std::abs(es.eigenvalues()(0)),
                  std::abs(es.eigenvalues()(es.eigenvalues().size() - 1)));
}

// Largest |eigenvalue| of a Hermitian operator given as a matvec.
// Full reorthogonalization; stops once the extreme Ritz values settle.
inline double lanczos_norm(const std::function<void(const Vec&, Vec&)>& matvec,
                           Eigen::Index dim, int max_iter = 400, double tol = 1e-13) {
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd;
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = cplx(nd(rng), nd(rng));
  v.normalize();
  std::vector<Vec> basis;
  std::vector<double> alpha, beta;
  Vec w(dim);
  double last = -1;
  int stable = 0;
  int m = static_cast<int>(std::min<Eigen::Index>(dim, max_iter));
  double est = 0;
  for (int j = 0; j < m; ++j) {
    basis.push_back(v);
    w.setZero();
    matvec(v, w);
    double a = std::real(v.dot(w));
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (auto& u : basis) w -= u * u.dot(w);
    double b = w.norm();
    int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri, Eigen::EigenvaluesOnly);
    est = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(k - 1)));
    if (b < 1e-12 * std::max(1.0, est)) break;
    if (std::abs(est - last) <= tol * std::max(1.0, est)) {
      if (++stable >= 3) break;
    } else {
      stable = 0;
    }
    last = est;
    beta.push_back(b);
    v = w / b;
  }
  return est;
}

enum class NormMode { dense, one_norm };

inline NormMode parse_norm_mode(const std::string& s) {
  if (s == "dense") return NormMode::dense;
  if (s == "one-norm" || s == "one_norm" || s == "one_norm_upper") return NormMode::one_norm;
  throw std::invalid_argument("unknown norm mode '" + s + "'");
}

inline std::string to_string(NormMode m) { return m == NormMode::dense ? "dense" : "one-norm"; }

inline double dense_operator_norm(const PauliSum& a, int limit = kDefaultDenseLimit) {
  if (a.empty()) return 0.0;
  check_dense(a.n(), limit);
  if (a.size() == 1) return std::abs(a.terms().begin()->second);
  const Eigen::Index dim = Eigen::Index{1} << a.n();
  if (dim <= 256) return hermitian_spectral_norm(materialize(a, limit));
  auto terms = dense_terms(a);
  return lanczos_norm([&](const Vec& in, Vec& out) { apply_terms(terms, in, out); }, dim);
}

inline double operator_norm(const PauliSum& a, NormMode mode,
                            int limit = kDefaultDenseLimit) {
  return mode == NormMode::dense ? dense_operator_norm(a, limit) : one_norm(a);
}

// exp(i*theta*G) for a Hermitian matrix G.
inline Mat expi_hermitian(const Mat& g, double theta) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  Vec ph(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < ph.size(); ++i)
    ph(i) = std::exp(cplx(0, theta * es.eigenvalues()(i)));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace tlc
