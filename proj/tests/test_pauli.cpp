#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "trotterlc/dense.hpp"
#include "trotterlc/models.hpp"
#include "trotterlc/pauli.hpp"

using namespace tlc;

namespace {

PauliString W(const char* s) { return PauliString::from_string(s); }
PauliSum S(std::initializer_list<std::pair<const char*, double>> terms) {
  PauliSum out;
  for (auto& [w, c] : terms) out.add(W(w), c);
  return out;
}

}  // namespace

TEST(Multiply, XTimesZIsMinusIY) {
  auto p = multiply(W("X"), W("Z"));
  EXPECT_EQ(p.word, W("Y"));
  EXPECT_EQ(p.phase(), cplx(0, -1));
}

TEST(Multiply, IdentityAndInvolution) {
  for (const char* w : {"X", "Y", "Z", "I"}) {
    auto p = multiply(W("I"), W(w));
    EXPECT_EQ(p.word, W(w));
    EXPECT_EQ(p.phase(), cplx(1, 0));
  }
  auto sq = multiply(W("XZ"), W("XZ"));
  EXPECT_EQ(sq.word, W("II"));
  EXPECT_EQ(sq.phase(), cplx(1, 0));
}

TEST(Multiply, SizeMismatchRejected) {
  EXPECT_THROW(multiply(W("XX"), W("X")), PauliError);
}

TEST(Multiply, AllTwoQubitPairsMatchKronecker) {
  const char* L = "IXYZ";
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      std::string wa{L[a / 4], L[a % 4]}, wb{L[b / 4], L[b % 4]};
      auto p = multiply(W(wa.c_str()), W(wb.c_str()));
      oracle::Mat lhs = oracle::word(wa) * oracle::word(wb);
      oracle::Mat rhs = p.phase() * oracle::word(p.word.str());
      EXPECT_LT((lhs - rhs).norm(), 1e-12) << wa << "*" << wb;
    }
}

TEST(Multiply, Associative) {
  std::mt19937_64 rng(7);
  const char* L = "IXYZ";
  std::uniform_int_distribution<int> d(0, 3);
  for (int it = 0; it < 200; ++it) {
    std::string s[3];
    for (auto& w : s)
      for (int q = 0; q < 5; ++q) w += L[d(rng)];
    auto ab = multiply(W(s[0].c_str()), W(s[1].c_str()));
    auto abc = multiply(ab.word, W(s[2].c_str()));
    auto bc = multiply(W(s[1].c_str()), W(s[2].c_str()));
    auto a_bc = multiply(W(s[0].c_str()), bc.word);
    EXPECT_EQ(abc.word, a_bc.word);
    EXPECT_EQ(ab.phase() * abc.phase(), bc.phase() * a_bc.phase());
  }
}

TEST(Multiply, WideWordsAcrossMachineWords) {
  int n = 130;
  auto a = PauliString::sites(n, {{0, 'X'}, {64, 'Z'}, {129, 'Y'}});
  auto b = PauliString::sites(n, {{0, 'Z'}, {64, 'Z'}, {129, 'X'}});
  auto p = multiply(a, b);
  // X*Z = -iY, Z*Z = I, Y*X = -iZ
  EXPECT_EQ(p.word, PauliString::sites(n, {{0, 'Y'}, {129, 'Z'}}));
  EXPECT_EQ(p.phase(), cplx(-1, 0));
  EXPECT_EQ(a.support(), (SupportSet{0, 64, 129}));
}

TEST(Commutator, SingleAnticommutingPair) {
  // [ZZ, IX] = 2i ZY, stored as i[.,.] = -2 ZY.
  auto c = commutator(S({{"ZZ", 1}}), S({{"IX", 1}}));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c.coeff(W("ZY")), -2.0);
}

TEST(Commutator, SelfCommutatorEmpty) {
  auto a = S({{"XY", 0.3}, {"ZI", -1.2}, {"YY", 0.7}});
  EXPECT_TRUE(commutator(a, a).empty());
}

TEST(Commutator, ThreeQubitMatchesDense) {
  auto a = S({{"XXI", 1}});
  auto b = S({{"IZZ", 1}});
  auto c = commutator(a, b);
  oracle::Mat A = oracle::matrix(a), B = oracle::matrix(b);
  oracle::Mat expect = cplx(0, 1) * (A * B - B * A);
  EXPECT_LT((oracle::matrix(c) - expect).norm(), 1e-12);
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(c.terms().begin()->first, W("XYZ"));
}

TEST(Commutator, RandomSumsMatchDenseAndAntisymmetric) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 30; ++it) {
    auto a = oracle::random_sum(rng, 3, 5);
    auto b = oracle::random_sum(rng, 3, 5);
    auto c = commutator(a, b);
    oracle::Mat A = oracle::matrix(a), B = oracle::matrix(b);
    EXPECT_LT((oracle::matrix(c) - cplx(0, 1) * (A * B - B * A)).norm(), 1e-11);
    EXPECT_EQ(commutator(b, a), -1.0 * c);
  }
}

TEST(Commutator, JacobiIdentity) {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 30; ++it) {
    auto a = oracle::random_sum(rng, 3, 4);
    auto b = oracle::random_sum(rng, 3, 4);
    auto c = oracle::random_sum(rng, 3, 4);
    auto j = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
             commutator(c, commutator(a, b));
    EXPECT_LT(oracle::matrix(j).norm(), 1e-11);
  }
}

TEST(Commutator, SymplecticParityDecidesCommutation) {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 200; ++it) {
    auto a = oracle::random_sum(rng, 4, 1);
    auto b = oracle::random_sum(rng, 4, 1);
    if (a.empty() || b.empty()) continue;
    auto pa = a.terms().begin()->first, pb = b.terms().begin()->first;
    int parity = std::popcount(pa.x64() & pb.z64()) + std::popcount(pb.x64() & pa.z64());
    oracle::Mat A = oracle::word(pa.str()), B = oracle::word(pb.str());
    bool dense_commute = (A * B - B * A).norm() < 1e-12;
    EXPECT_EQ(parity % 2 == 0, dense_commute);
    EXPECT_EQ(commutes(pa, pb), dense_commute);
  }
}

TEST(Commutator, SizeMismatchRejected) {
  EXPECT_THROW(commutator(S({{"XX", 1}}), S({{"Z", 1}})), PauliError);
}

TEST(Norms, OneNorm) {
  EXPECT_EQ(one_norm(PauliSum(3)), 0.0);
  EXPECT_DOUBLE_EQ(one_norm(S({{"X", 0.5}, {"Z", -0.25}})), 0.75);
  EXPECT_NEAR(one_norm(build_tfi(12, 0.2, 1.0)), 14.2, 1e-12);
}

TEST(Norms, MagnetizationTwoNorm) {
  for (int n : {1, 4, 9, 16}) {
    auto m = sum_z(n, 1.0 / n);
    EXPECT_NEAR(normalized_two_norm(m), 1.0 / std::sqrt(n), 1e-15);
  }
  EXPECT_DOUBLE_EQ(normalized_two_norm(S({{"XYZ", -0.3}})), 0.3);
}

TEST(Norms, TwoNormMatchesDenseFrobenius) {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 20; ++it) {
    int n = 1 + it % 6;
    auto a = oracle::random_sum(rng, n, 6);
    oracle::Mat m = oracle::matrix(a);
    double dense = std::sqrt((m.adjoint() * m).trace().real() / m.rows());
    EXPECT_NEAR(normalized_two_norm(a), dense, 1e-12);
  }
}

TEST(Norms, FourNormSingleWordAndBudget) {
  EXPECT_DOUBLE_EQ(normalized_four_norm(S({{"XZ", 1}})), 1.0);
  auto big = sum_z(20);
  EXPECT_THROW(normalized_four_norm(big, 100), PauliError);
}

TEST(Norms, FourNormOfDisjointZSumWithinRange) {
  for (int M : {2, 4, 8}) {
    double v = normalized_four_norm(sum_z(M));
    EXPECT_GE(v, std::sqrt(M) - 1e-12);
    EXPECT_LE(v, std::pow(M * M * M, 0.25) + 1e-12);
    // Tr(O^4)/d = 3M^2 - 2M for O = sum of M independent Z's.
    EXPECT_NEAR(v, std::pow(3.0 * M * M - 2.0 * M, 0.25), 1e-12);
  }
}

TEST(Norms, FourNormMatchesDense) {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 20; ++it) {
    auto a = oracle::random_sum(rng, 4, 6);
    oracle::Mat m = oracle::matrix(a);
    oracle::Mat aa = m * m.adjoint();
    double dense = std::pow((aa * aa).trace().real() / m.rows(), 0.25);
    EXPECT_NEAR(normalized_four_norm(a), dense, 1e-10);
  }
}

TEST(Norms, OperatorNormModes) {
  auto z = S({{"Z", 1}});
  EXPECT_DOUBLE_EQ(operator_norm(z, NormMode::dense), 1.0);
  EXPECT_DOUBLE_EQ(operator_norm(z, NormMode::one_norm), 1.0);
  auto xz = S({{"X", 1}, {"Z", 1}});
  EXPECT_NEAR(operator_norm(xz, NormMode::dense), std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(operator_norm(xz, NormMode::one_norm), 2.0);
  EXPECT_THROW(operator_norm(sum_z(13), NormMode::dense), DenseLimitError);
  EXPECT_NO_THROW(operator_norm(sum_z(13), NormMode::one_norm));
}

TEST(Norms, NormChainOnRandomSums) {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 100; ++it) {
    auto a = oracle::random_sum(rng, 5, 1 + it % 8);
    double d = operator_norm(a, NormMode::dense);
    EXPECT_NEAR(d, oracle::spectral(oracle::matrix(a)), 1e-10);
    EXPECT_LE(normalized_two_norm(a), d + 1e-12);
    EXPECT_LE(d, one_norm(a) + 1e-12);
  }
}

TEST(Norms, LanczosPathMatchesExactAtNine) {
  auto h = build_tfi(9, 0.7, 1.3);
  auto terms = dense_terms(h);
  double lz = lanczos_norm([&](const Vec& in, Vec& out) { apply_terms(terms, in, out); }, 512);
  EXPECT_NEAR(lz, hermitian_spectral_norm(materialize(h)), 1e-9);
}

TEST(PauliSum, CanonicalFormDropsZeros) {
  PauliSum a = S({{"XX", 0.5}});
  a.add(W("XX"), -0.5);
  EXPECT_TRUE(a.empty());
  a.add(W("ZZ"), 1e-16);
  EXPECT_TRUE(a.empty());
  EXPECT_THROW(a.add(W("Z"), 1.0), PauliError);
}

TEST(PauliSum, TextRoundTripIsIdempotent) {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 20; ++it) {
    auto a = oracle::random_sum(rng, 5, 7);
    auto once = parse_pauli_text(format_pauli_text(a));
    EXPECT_EQ(once, a);
    EXPECT_EQ(format_pauli_text(once), format_pauli_text(a));
  }
}

TEST(PauliSum, TextParserMergesAndReportsLines) {
  auto a = parse_pauli_text("# comment\n0.5 XX\n\n0.5 XX  # again\n");
  EXPECT_EQ(a.size(), 1u);
  EXPECT_DOUBLE_EQ(a.coeff(W("XX")), 1.0);
  auto empty = parse_pauli_text("# n=4\n");
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(empty.n(), 4);
  try {
    parse_pauli_text("1 XX\n2 XQ\n");
    FAIL();
  } catch (const PauliError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_pauli_text("1 XX\n2 XXX\n"), PauliError);
  EXPECT_THROW(parse_pauli_text("abc XX\n"), PauliError);
}

TEST(PauliString, SupportAndOrder) {
  auto p = W("IXIYZ");
  EXPECT_EQ(p.support(), (SupportSet{1, 3, 4}));
  EXPECT_EQ(p.weight(), 3);
  EXPECT_TRUE(W("III").is_identity());
  EXPECT_TRUE(W("IX") < W("XI"));
  EXPECT_TRUE(W("XI") < W("YI"));
  EXPECT_TRUE(W("YI") < W("ZI"));
  EXPECT_THROW(W("XA"), PauliError);
}
