#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "oracle.hpp"
#include "trotterlc/dense.hpp"
#include "trotterlc/models.hpp"

using namespace tlc;

namespace {

int count_weight(const PauliSum& h, int w) {
  int c = 0;
  for (auto& [p, v] : h.terms()) c += p.weight() == w;
  return c;
}

std::string temp_path(const std::string& name) {
  return ::testing::TempDir() + "trotterlc_" + name;
}

}  // namespace

TEST(Mfi, SmallInstanceCountsAndNorm) {
  auto h = build_mfi(3, 1, 0.5, 1.2);
  EXPECT_EQ(count_weight(h, 2), 2);
  EXPECT_EQ(count_weight(h, 1), 6);
  EXPECT_NEAR(one_norm(h), 7.1, 1e-12);
  auto y = build_mfi(2, 0, 0, 1);
  EXPECT_EQ(y, PauliSum(PauliString::from_string("YI"), 1) +
                   PauliSum(PauliString::from_string("IY"), 1));
  EXPECT_EQ(build_mfi(4, 1, 0, 0).size(), 3u);
  EXPECT_THROW(build_mfi(1, 1, 1, 1), ModelError);
}

TEST(Mfi, TermCountClosedForm) {
  for (int n = 2; n <= 30; n += 7) EXPECT_EQ(build_mfi(n, 1, 0.5, 1.2).size(), size_t(3 * n - 1));
}

TEST(Tfi, CountsAndGroundEnergy) {
  auto h = build_tfi(12, 0.2, 1);
  EXPECT_EQ(count_weight(h, 2), 11);
  EXPECT_EQ(count_weight(h, 1), 12);
  EXPECT_EQ(build_tfi(2, 1, 0).size(), 1u);
  EXPECT_THROW(build_tfi(1, 1, 1), ModelError);

  auto h4 = build_tfi(4, 1, 1);
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::matrix(h4));
  Eigen::SelfAdjointEigenSolver<Mat> lib(materialize(h4));
  EXPECT_NEAR(es.eigenvalues()(0), lib.eigenvalues()(0), 1e-10);
  // Frozen from numpy eigvalsh on the same Hamiltonian.
  EXPECT_NEAR(es.eigenvalues()(0), -4.758770483143631, 1e-9);
}

TEST(PowerLaw, Coefficients) {
  auto h = build_power_law(3, 1, 0, 4);
  EXPECT_DOUBLE_EQ(h.coeff(PauliString::from_string("XIX")), 1.0 / 16);
  EXPECT_DOUBLE_EQ(h.coeff(PauliString::from_string("ZIZ")), 1.0 / 16);
  auto h2 = build_power_law(2, 1, 0.5, 2);
  EXPECT_EQ(h2.size(), 5u);
  EXPECT_DOUBLE_EQ(h2.coeff(PauliString::from_string("YY")), 1.0);
  EXPECT_DOUBLE_EQ(h2.coeff(PauliString::from_string("XI")), 0.5);
  auto h8 = build_power_law(8, 1, 0.5, 4);
  EXPECT_EQ(h8.size(), size_t(3 * 28 + 8));
  EXPECT_THROW(build_power_law(4, 1, 0, 0), ModelError);
}

TEST(Lattice, EdgeCounts) {
  PauliSum zz(PauliString::from_string("ZZ"), 1);
  EXPECT_EQ(build_nn_lattice(LatticeSpec{{2, 2}}, zz).size(), 4u);
  EXPECT_EQ(build_nn_lattice(LatticeSpec{{5}}, zz).size(), 4u);
  EXPECT_EQ(build_nn_lattice(LatticeSpec{{3, 3}}, zz).size(), 12u);
  EXPECT_EQ(LatticeSpec({3, 3}).edges().size(), 12u);
  PauliSum bad(PauliString::from_string("ZZZ"), 1);
  EXPECT_THROW(build_nn_lattice(LatticeSpec{{3}}, bad), ModelError);
  PauliSum one_site(PauliString::from_string("ZI"), 1);
  EXPECT_THROW(build_nn_lattice(LatticeSpec{{3}}, one_site), ModelError);
  EXPECT_THROW(validate(LatticeSpec{{}}), ModelError);
}

TEST(Lattice, TemplateWithTwoTermsAndDistance) {
  PauliSum t(PauliString::from_string("XX"), 0.5);
  t.add(PauliString::from_string("YY"), 0.5);
  auto h = build_nn_lattice(LatticeSpec{{2, 3}}, t);
  EXPECT_EQ(h.size(), 2u * 7u);
  LatticeSpec l{{3, 4}};
  EXPECT_DOUBLE_EQ(l.distance(l.index({0, 0}), l.index({2, 3})), std::sqrt(13.0));
  EXPECT_EQ(l.coords(l.index({2, 1})), (std::vector<int>{2, 1}));
}

TEST(LoadFile, MergesDuplicatesAndRoundTrips) {
  auto path = temp_path("dup.txt");
  {
    std::ofstream f(path);
    f << "0.5 XX\n0.5 XX\n";
  }
  auto a = load_pauli_file(path);
  EXPECT_EQ(a.size(), 1u);
  EXPECT_DOUBLE_EQ(a.coeff(PauliString::from_string("XX")), 1.0);

  {
    std::ofstream f(path);
    f << "# n=5\n";
  }
  auto e = load_pauli_file(path);
  EXPECT_TRUE(e.empty());
  EXPECT_EQ(e.n(), 5);

  auto tfi = build_tfi(4, 1, 1);
  {
    std::ofstream f(path);
    f << format_pauli_text(tfi);
  }
  EXPECT_EQ(load_pauli_file(path), tfi);

  auto jpath = temp_path("h.json");
  {
    std::ofstream f(jpath);
    f << to_json(tfi).dump();
  }
  EXPECT_EQ(load_pauli_file(jpath), tfi);

  {
    std::ofstream f(path);
    f << "1.0 XX\n1.0 X\n";
  }
  try {
    load_pauli_file(path);
    FAIL();
  } catch (const ModelError& err) {
    EXPECT_NE(std::string(err.what()).find("line 2"), std::string::npos);
  }
  {
    std::ofstream f(jpath);
    f << R"({"n": 3, "terms": [{"pauli": "XX", "coeff": 1}]})";
  }
  EXPECT_THROW(load_pauli_file(jpath), ModelError);
  EXPECT_THROW(load_pauli_file(temp_path("missing")), ModelError);
  std::remove(path.c_str());
  std::remove(jpath.c_str());
}

TEST(Grouping, TfiSplitsIntoTwoGroups) {
  auto h = build_tfi(6, 1, 1);
  auto g = group_commuting(h);
  ASSERT_EQ(g.size(), 2u);
  for (auto& grp : g) {
    int w = grp.terms().begin()->first.weight();
    for (auto& [p, c] : grp.terms()) EXPECT_EQ(p.weight(), w);
  }
  EXPECT_EQ(group_commuting(PauliSum(PauliString::from_string("XY"), 1)).size(), 1u);
  PauliSum diag = sum_z(5);
  diag.add(PauliString::from_string("ZZIZI"), 0.3);
  EXPECT_EQ(group_commuting(diag).size(), 1u);
}

TEST(Grouping, PartitionPropertyOnRandomSums) {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 30; ++it) {
    auto h = oracle::random_sum(rng, 5, 12);
    auto groups = group_commuting(h);
    PauliSum total(5);
    size_t count = 0;
    for (auto& g : groups) {
      count += g.size();
      total += g;
      for (auto& [p, c] : g.terms())
        for (auto& [q, d] : g.terms()) EXPECT_TRUE(commutes(p, q));
    }
    EXPECT_EQ(count, h.size());
    EXPECT_EQ(total, h);
  }
}

TEST(Truncation, GlobalAndInner) {
  auto lat5 = LatticeSpec::chain(5);
  auto h5 = build_power_law(5, 1, 0, 4);
  auto t = truncate_power_law(h5, lat5, 1);
  for (auto& [p, c] : t.kept.terms()) EXPECT_LE(term_diameter(p, lat5), 1.0);
  EXPECT_EQ(t.kept.size(), 12u);
  EXPECT_EQ(t.kept + t.removed, h5);

  EXPECT_EQ(truncate_power_law(h5, lat5, 4).removed_one_norm, 0.0);

  auto h6 = build_power_law(6, 1, 0.5, 4);
  auto t6 = truncate_power_law(h6, LatticeSpec::chain(6), 2);
  double expect = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 3; j < 6; ++j) expect += 3.0 / std::pow(j - i, 4);
  EXPECT_NEAR(t6.removed_one_norm, expect, 1e-15);
  EXPECT_NEAR(expect, 9.0 / 81 + 6.0 / 256 + 3.0 / 625, 1e-15);

  auto h8 = build_power_law(8, 1, 0.5, 4);
  auto inner = truncate_power_law(h8, LatticeSpec::chain(8), 2, InnerRegion{{0}, 1});
  for (auto& [p, c] : inner.removed.terms()) {
    auto s = p.support();
    EXPECT_TRUE(*s.begin() <= 1);
  }
  auto global = truncate_power_law(h8, LatticeSpec::chain(8), 2);
  EXPECT_LT(inner.removed_one_norm, global.removed_one_norm);
  EXPECT_EQ(inner.kept + inner.removed, h8);
  EXPECT_THROW(truncate_power_law(h8, LatticeSpec::chain(8), 0), ModelError);
}

TEST(Observables, ProjectorExpansion) {
  auto p = zero_projector(3, 2);
  EXPECT_EQ(p.size(), 4u);
  oracle::Mat m = oracle::matrix(p);
  EXPECT_LT((m * m - m).norm(), 1e-12);
  EXPECT_NEAR(m.trace().real(), 2.0, 1e-12);
  EXPECT_THROW(zero_projector(3, 4), ModelError);
}

TEST(Params, Parsing) {
  auto p = parse_params("J=1, h=0.5,alpha=4");
  EXPECT_EQ(p.size(), 3u);
  EXPECT_DOUBLE_EQ(p["h"], 0.5);
  EXPECT_DOUBLE_EQ(p["alpha"], 4);
  EXPECT_THROW(parse_params("J"), ModelError);
  EXPECT_THROW(parse_params("J=abc"), ModelError);
}
