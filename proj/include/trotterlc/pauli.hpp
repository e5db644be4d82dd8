#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tlc {

using cplx = std::complex<double>;

inline constexpr double kDropTol = 1e-14;

class PauliError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sorted set of qubit indices.
using SupportSet = std::set<int>;

inline bool intersects(const SupportSet& a, const SupportSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

inline SupportSet set_union(const SupportSet& a, const SupportSet& b) {
  SupportSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline SupportSet set_minus(const SupportSet& a, const SupportSet& b) {
  SupportSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(out, out.end()));
  return out;
}

inline bool is_subset(const SupportSet& a, const SupportSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// n-qubit Pauli word without phase. Y is stored as x=z=1.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n) : n_(n), x_(words_for(n), 0), z_(words_for(n), 0) {
    if (n < 0) throw PauliError("negative qubit count");
  }

  static PauliString from_string(std::string_view s) {
    PauliString p(static_cast<int>(s.size()));
    for (int q = 0; q < p.n_; ++q) {
      switch (s[q]) {
        case 'I': case 'i': break;
        case 'X': case 'x': p.set(q, true, false); break;
        case 'Y': case 'y': p.set(q, true, true); break;
        case 'Z': case 'z': p.set(q, false, true); break;
        default:
          throw PauliError("bad Pauli character '" + std::string(1, s[q]) + "'");
      }
    }
    return p;
  }

  // Word from (qubit, letter) pairs, e.g. sites(n, {{0, 'Z'}, {1, 'Z'}}).
  static PauliString sites(int n, std::initializer_list<std::pair<int, char>> ops) {
    PauliString p(n);
    for (auto [q, c] : ops) {
      if (q < 0 || q >= n) throw PauliError("qubit index out of range");
      p.set(q, c == 'X' || c == 'Y', c == 'Z' || c == 'Y');
    }
    return p;
  }

  int n() const { return n_; }
  const std::vector<uint64_t>& xw() const { return x_; }
  const std::vector<uint64_t>& zw() const { return z_; }

  void set_word(size_t w, uint64_t xm, uint64_t zm) {
    x_[w] = xm;
    z_[w] = zm;
  }

  bool x(int q) const { return (x_[q >> 6] >> (q & 63)) & 1u; }
  bool z(int q) const { return (z_[q >> 6] >> (q & 63)) & 1u; }

  void set(int q, bool xb, bool zb) {
    uint64_t m = uint64_t{1} << (q & 63);
    if (xb) x_[q >> 6] |= m; else x_[q >> 6] &= ~m;
    if (zb) z_[q >> 6] |= m; else z_[q >> 6] &= ~m;
  }

  char at(int q) const {
    static constexpr char tbl[2][2] = {{'I', 'Z'}, {'X', 'Y'}};
    return tbl[x(q)][z(q)];
  }

  bool is_identity() const {
    for (size_t w = 0; w < x_.size(); ++w)
      if (x_[w] | z_[w]) return false;
    return true;
  }

  int weight() const {
    int c = 0;
    for (size_t w = 0; w < x_.size(); ++w) c += std::popcount(x_[w] | z_[w]);
    return c;
  }

  SupportSet support() const {
    SupportSet s;
    for (size_t w = 0; w < x_.size(); ++w) {
      uint64_t m = x_[w] | z_[w];
      while (m) {
        int b = std::countr_zero(m);
        s.insert(static_cast<int>(w * 64 + b));
        m &= m - 1;
      }
    }
    return s;
  }

  std::string str() const {
    std::string s(n_, 'I');
    for (int q = 0; q < n_; ++q) s[q] = at(q);
    return s;
  }

  // Masks of the low 64 qubits, qubit q at bit q.
  uint64_t x64() const { return x_.empty() ? 0 : x_[0]; }
  uint64_t z64() const { return z_.empty() ? 0 : z_[0]; }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_;
  }

  // Text order: qubit 0 most significant, I < X < Y < Z.
  friend bool operator<(const PauliString& a, const PauliString& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    for (size_t w = 0; w < a.x_.size(); ++w) {
      uint64_t d = (a.x_[w] ^ b.x_[w]) | (a.z_[w] ^ b.z_[w]);
      if (!d) continue;
      int q = static_cast<int>(w * 64) + std::countr_zero(d);
      return code(a.at(q)) < code(b.at(q));
    }
    return false;
  }

  static int words_for(int n) { return (n + 63) / 64; }

 private:
  static int code(char c) { return c == 'I' ? 0 : c == 'X' ? 1 : c == 'Y' ? 2 : 3; }

  int n_ = 0;
  std::vector<uint64_t> x_;
  std::vector<uint64_t> z_;
};

inline void require_same_n(int a, int b) {
  if (a != b)
    throw PauliError("qubit count mismatch: " + std::to_string(a) + " vs " +
                     std::to_string(b));
}

inline bool commutes(const PauliString& a, const PauliString& b) {
  require_same_n(a.n(), b.n());
  int c = 0;
  for (size_t w = 0; w < a.xw().size(); ++w)
    c += std::popcount(a.xw()[w] & b.zw()[w]) + std::popcount(b.xw()[w] & a.zw()[w]);
  return (c & 1) == 0;
}

// a*b = i^k * word, k in {0,1,2,3}.
struct PauliProduct {
  PauliString word;
  int k = 0;
  cplx phase() const {
    static const cplx tbl[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return tbl[k & 3];
  }
};

inline PauliProduct multiply(const PauliString& a, const PauliString& b) {
  require_same_n(a.n(), b.n());
  // P = i^{x.z} X^x Z^z, and Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1.
  PauliString out(a.n());
  int k = 0;
  for (size_t w = 0; w < a.xw().size(); ++w) {
    uint64_t x1 = a.xw()[w], z1 = a.zw()[w], x2 = b.xw()[w], z2 = b.zw()[w];
    uint64_t x3 = x1 ^ x2, z3 = z1 ^ z2;
    k += std::popcount(x1 & z1) + std::popcount(x2 & z2) + 2 * std::popcount(z1 & x2) -
         std::popcount(x3 & z3);
    out.set_word(w, x3, z3);
  }
  return {std::move(out), ((k % 4) + 4) % 4};
}

// Hermitian operator as a real combination of Pauli words.
class PauliSum {
 public:
  using Map = std::map<PauliString, double>;

  PauliSum() = default;
  explicit PauliSum(int n) : n_(n) {}
  PauliSum(const PauliString& p, double c) : n_(p.n()) { add(p, c); }

  int n() const { return n_; }
  const Map& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add(const PauliString& p, double c) {
    if (n_ == 0 && terms_.empty()) n_ = p.n();
    require_same_n(n_, p.n());
    auto it = terms_.find(p);
    if (it == terms_.end()) {
      if (std::abs(c) >= kDropTol) terms_.emplace(p, c);
      return;
    }
    it->second += c;
    if (std::abs(it->second) < kDropTol) terms_.erase(it);
  }

  double coeff(const PauliString& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? 0.0 : it->second;
  }

  PauliSum& operator+=(const PauliSum& o) {
    if (n_ == 0 && terms_.empty()) n_ = o.n_;
    if (!o.empty()) require_same_n(n_, o.n_);
    for (auto& [p, c] : o.terms_) add(p, c);
    return *this;
  }
  PauliSum& operator-=(const PauliSum& o) {
    if (n_ == 0 && terms_.empty()) n_ = o.n_;
    if (!o.empty()) require_same_n(n_, o.n_);
    for (auto& [p, c] : o.terms_) add(p, -c);
    return *this;
  }
  PauliSum& operator*=(double s) {
    if (s == 0.0) { terms_.clear(); return *this; }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      if (std::abs(it->second) < kDropTol) it = terms_.erase(it); else ++it;
    }
    return *this;
  }
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(double s, PauliSum a) { return a *= s; }
  friend bool operator==(const PauliSum& a, const PauliSum& b) {
    return a.terms_ == b.terms_;
  }

  SupportSet support() const {
    SupportSet s;
    for (auto& [p, c] : terms_) {
      auto ps = p.support();
      s.insert(ps.begin(), ps.end());
    }
    return s;
  }

  // Coefficient on the identity word.
  double trace_part() const { return coeff(PauliString(n_)); }

  std::string str() const {
    std::ostringstream os;
    os.precision(17);
    for (auto& [p, c] : terms_) os << c << ' ' << p.str() << '\n';
    return os.str();
  }

 private:
  int n_ = 0;
  Map terms_;
};

inline PauliSum sum_of(const std::vector<PauliSum>& parts, int n) {
  PauliSum out(n);
  for (auto& p : parts) out += p;
  return out;
}

// Returns i*[a,b], which is Hermitian with real coefficients.
inline PauliSum commutator(const PauliSum& a, const PauliSum& b) {
  if (!a.empty() && !b.empty()) require_same_n(a.n(), b.n());
  PauliSum out(a.n() ? a.n() : b.n());
  for (auto& [pa, ca] : a.terms())
    for (auto& [pb, cb] : b.terms()) {
      if (commutes(pa, pb)) continue;
      auto prod = multiply(pa, pb);
      // [P,Q] = 2 i^k R for anticommuting words; i*i^k is real for odd k.
      out.add(prod.word, 2.0 * ca * cb * (prod.k == 3 ? 1.0 : -1.0));
    }
  return out;
}

inline bool commutes(const PauliSum& a, const PauliSum& b) {
  if (!intersects(a.support(), b.support())) return true;
  for (auto& [pa, ca] : a.terms())
    for (auto& [pb, cb] : b.terms())
      if (!commutes(pa, pb)) return commutator(a, b).empty();
  return true;
}

inline double one_norm(const PauliSum& a) {
  double s = 0;
  for (auto& [p, c] : a.terms()) s += std::abs(c);
  return s;
}

inline double normalized_two_norm(const PauliSum& a) {
  double s = 0;
  for (auto& [p, c] : a.terms()) s += c * c;
  return std::sqrt(s);
}

inline constexpr size_t kDefaultFourNormBudget = 50'000'000;

// (Tr|A|^4 / d)^{1/4} via the Pauli expansion of A*A (A Hermitian).
inline double normalized_four_norm(const PauliSum& a,
                                   size_t budget = kDefaultFourNormBudget) {
  size_t m = a.size();
  if (m * m > budget)
    throw PauliError("four-norm product expansion needs " + std::to_string(m * m) +
                     " products, budget is " + std::to_string(budget));
  std::vector<std::pair<PauliString, double>> t(a.terms().begin(), a.terms().end());
  // A^2 is Hermitian; pairs (i,j) and (j,i) combine into a real coefficient
  // when the words commute and cancel otherwise.
  PauliSum sq(a.n());
  for (size_t i = 0; i < m; ++i) {
    sq.add(PauliString(a.n()), t[i].second * t[i].second);
    for (size_t j = i + 1; j < m; ++j) {
      if (!commutes(t[i].first, t[j].first)) continue;
      auto prod = multiply(t[i].first, t[j].first);
      sq.add(prod.word, 2.0 * t[i].second * t[j].second * prod.phase().real());
    }
  }
  double s = 0;
  for (auto& [p, c] : sq.terms()) s += c * c;
  return std::pow(s, 0.25);
}

inline PauliSum parse_pauli_text(std::istream& in) {
  PauliSum out;
  std::string line;
  int lineno = 0;
  int n = -1;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    std::string body = hash == std::string::npos ? line : line.substr(0, hash);
    std::istringstream ls(body);
    std::string first;
    if (!(ls >> first)) {
      // "# n=<int>" header carries the size of an empty file.
      if (hash != std::string::npos) {
        auto pos = line.find("n=", hash);
        if (pos != std::string::npos && n < 0) {
          try { n = std::stoi(line.substr(pos + 2)); } catch (...) {}
        }
      }
      continue;
    }
    double c;
    std::string word, extra;
    try {
      size_t used = 0;
      c = std::stod(first, &used);
      if (used != first.size()) throw std::invalid_argument("");
    } catch (...) {
      throw PauliError("line " + std::to_string(lineno) + ": bad coefficient '" + first + "'");
    }
    if (!(ls >> word) || (ls >> extra))
      throw PauliError("line " + std::to_string(lineno) + ": expected '<coeff> <word>'");
    PauliString p;
    try {
      p = PauliString::from_string(word);
    } catch (const PauliError& e) {
      throw PauliError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (out.empty() && n < 0) n = p.n();
    if (p.n() != n)
      throw PauliError("line " + std::to_string(lineno) + ": word length " +
                       std::to_string(p.n()) + " differs from " + std::to_string(n));
    if (out.n() == 0) out = PauliSum(n);
    out.add(p, c);
  }
  if (out.n() == 0 && n > 0) out = PauliSum(n);
  return out;
}

inline PauliSum parse_pauli_text(const std::string& s) {
  std::istringstream in(s);
  return parse_pauli_text(in);
}

inline std::string format_pauli_text(const PauliSum& a) {
  return "# n=" + std::to_string(a.n()) + "\n" + a.str();
}

}  // namespace tlc
