#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trotterlc/experiments.hpp"

using namespace tlc;

#ifndef TROTTERLC_CLI
#define TROTTERLC_CLI "trotterlc"
#endif

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(TROTTERLC_CLI) + " " + args + " 2>/dev/null";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return res;
  std::array<char, 4096> buf;
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
  int status = pclose(pipe);
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string temp_path(const std::string& name) {
  return ::testing::TempDir() + "trotterlc_cli_" + name;
}

}  // namespace

TEST(Emit, CsvHeaderOnlyForEmptyTable) {
  Table tab{{"a", "b"}, {}};
  auto text = render(tab, "csv", {{"x", 1}});
  EXPECT_EQ(text, "# config {\"x\":1}\na,b\n");
}

TEST(Emit, CsvQuotingAndNulls) {
  Table tab{{"a", "b", "c"}, {}};
  tab.add({"x,y", nullptr, 1.5});
  auto text = render(tab, "csv", nlohmann::json::object());
  EXPECT_NE(text.find("\"x,y\",,1.5\n"), std::string::npos);
  EXPECT_THROW(tab.add({1}), std::logic_error);
  EXPECT_THROW(render(tab, "xml", {}), ConfigError);
}

TEST(Emit, JsonRoundTripKeepsColumnOrder) {
  Table tab{{"zeta", "alpha"}, {}};
  tab.add({3, "s"});
  tab.add({4, "t"});
  auto text = render(tab, "json", {{"model", "tfi"}});
  auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["config"]["model"], "tfi");
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][1]["zeta"], 4);
  EXPECT_LT(text.find("zeta"), text.find("alpha"));
  EXPECT_EQ(render(tab, "json", {}), render(tab, "json", {}));
}

TEST(Config, MergeAndUnknownKeys) {
  ExperimentConfig c;
  merge_json(c, {{"model", "mfi"}, {"n", 6}, {"epsilon", 0.01}, {"params", {{"h", 0.3}}}});
  EXPECT_EQ(c.model, "mfi");
  EXPECT_EQ(c.n, 6);
  ASSERT_TRUE(c.epsilon);
  EXPECT_DOUBLE_EQ(*c.epsilon, 0.01);
  EXPECT_DOUBLE_EQ(c.params.at("h"), 0.3);
  merge_json(c, {{"epsilon", nullptr}});
  EXPECT_FALSE(c.epsilon);
  EXPECT_THROW(merge_json(c, {{"bogus", 1}}), ConfigError);
  EXPECT_THROW(merge_json(c, {{"n", "six"}}), ConfigError);
  EXPECT_THROW(merge_json(c, nlohmann::json::array()), ConfigError);

  ExperimentConfig back;
  merge_json(back, to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Config, ResolveDefaults) {
  ExperimentConfig c;
  c.experiment = "dqpt";
  c.k = 2;
  resolve_defaults(c);
  EXPECT_EQ(c.observable, "proj2");
  EXPECT_EQ(*c.merge, "step");
  ExperimentConfig b;
  resolve_defaults(b);
  EXPECT_EQ(*b.merge, "adjacent");
}

TEST(Observable, Specs) {
  EXPECT_EQ(build_observable("z2", 4), PauliSum(PauliString::from_string("IIZI"), 1));
  EXPECT_EQ(build_observable("x0", 2), PauliSum(PauliString::from_string("XI"), 1));
  EXPECT_EQ(build_observable("XYZ", 3), PauliSum(PauliString::from_string("XYZ"), 1));
  EXPECT_EQ(build_observable("sumz", 3), sum_z(3));
  EXPECT_EQ(build_observable("proj2", 4), zero_projector(4, 2));
  EXPECT_THROW(build_observable("z4", 4), ConfigError);
  EXPECT_THROW(build_observable("z1x", 4), ConfigError);
  EXPECT_THROW(build_observable("XYZ", 4), ConfigError);
  EXPECT_THROW(build_observable("q", 4), ConfigError);
}

TEST(Models, ConfigDriven) {
  ExperimentConfig c;
  c.model = "mfi";
  c.params = {{"h", 0.0}};
  EXPECT_EQ(build_model(c, 4).size(), 3u + 4u);
  c.params.clear();
  c.model = "nn2d";
  c.lattice = {2, 3};
  EXPECT_EQ(model_size(c), 6);
  EXPECT_EQ(build_model(c, model_size(c)).size(), 7u + 6u);
  c.model = "nope";
  EXPECT_THROW(build_model(c, 4), std::invalid_argument);
}

TEST(Gatecount, HugeEpsilonNeedsOneStep) {
  ExperimentConfig c;
  c.model = "tfi";
  c.n = 6;
  c.epsilon = 1e6;
  resolve_defaults(c);
  auto tab = run_gatecount(c);
  ASSERT_EQ(tab.rows.size(), 3u);
  for (auto& row : tab.rows) EXPECT_EQ(row[2], 1);
}

TEST(Cli, GoldenSimulateRun) {
  auto res = run_cli("simulate --model tfi --n 4 --t 1 --r 2 --formula standard --format json");
  ASSERT_EQ(res.code, 0) << res.out;
  auto j = nlohmann::json::parse(res.out);
  auto row = j["rows"][0];
  EXPECT_EQ(row["n"], 4);
  EXPECT_EQ(row["formula"], "standard");
  ExperimentConfig c;
  auto in = make_instance(c, 4);
  auto circ = standard_formula(in.parts, 1.0, 2, 2);
  EXPECT_EQ(row["exponential_count"], gate_count(circ));
  EXPECT_NEAR(row["heisenberg_error"].get<double>(), heisenberg_error(in.h, in.o, circ, 1.0),
              1e-12);
  EXPECT_EQ(j["config"]["merge"], "adjacent");
  EXPECT_EQ(run_cli("simulate --model tfi --n 4 --t 1 --r 2 --formula standard").out, res.out);
}

TEST(Cli, ConfigFileWithOverride) {
  auto path = temp_path("cfg.json");
  {
    std::ofstream f(path);
    f << R"({"model": "mfi", "n": 5, "t": 0.5, "r": 3, "bound": "worst"})";
  }
  auto res = run_cli("bound --config " + path + " --n 6");
  ASSERT_EQ(res.code, 0);
  auto j = nlohmann::json::parse(res.out);
  EXPECT_EQ(j["config"]["n"], 6);
  EXPECT_EQ(j["config"]["model"], "mfi");
  EXPECT_EQ(j["report"]["name"], "worst");
  EXPECT_EQ(j["report"]["r"], 3);

  auto search = run_cli("bound --config " + path + " --epsilon 0.001 --search-r");
  ASSERT_EQ(search.code, 0);
  auto s = nlohmann::json::parse(search.out);
  EXPECT_LE(s["report"]["value"].get<double>(), 0.001);
  std::remove(path.c_str());
}

TEST(Cli, ExitCodes) {
  auto bad = temp_path("bad.json");
  {
    std::ofstream f(bad);
    f << R"({"model": "tfi", "colour": 3})";
  }
  EXPECT_EQ(run_cli("bound --config " + bad + " --r 1").code, 2);
  {
    std::ofstream f(bad);
    f << "{not json";
  }
  EXPECT_EQ(run_cli("bound --config " + bad + " --r 1").code, 2);
  std::remove(bad.c_str());
  EXPECT_EQ(run_cli("bound --nonsense").code, 2);
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("--help").code, 0);
  EXPECT_EQ(run_cli("gatecount --epsilon -1").code, 2);
  EXPECT_EQ(run_cli("bound --model tfi --n 4 --observable z9 --r 1").code, 2);
  EXPECT_EQ(run_cli("simulate --model tfi --n 14 --r 1").code, 3);
  EXPECT_EQ(run_cli("bound --model tfi --n 13 --bound worst --r 1").code, 3);
  EXPECT_EQ(run_cli("dqpt --model tfi --n 6 --epsilon 1e-3 --budget 1 --grid-end 0.1").code, 3);
}

TEST(Cli, DecomposeAndCsv) {
  auto res = run_cli("decompose --model tfi --n 6 --observable z0");
  ASSERT_EQ(res.code, 0);
  auto j = nlohmann::json::parse(res.out);
  // X on the last site meets E_5 = {5} only after Z4Z5 has claimed it, so it
  // forms a seventh layer with an empty edge set.
  ASSERT_EQ(j["layers"].size(), 7u);
  EXPECT_TRUE(j["layers"][6]["edge_set"].empty());
  auto h = run_cli("decompose --model tfi --n 6 --decompose hypergraph --coloring lattice_parity");
  ASSERT_EQ(h.code, 0);
  EXPECT_EQ(nlohmann::json::parse(h.out)["chi"], 2);

  auto csv = run_cli("gatecount --model tfi --n-list 6,8 --epsilon 0.01 --format csv");
  ASSERT_EQ(csv.code, 0);
  std::istringstream in(csv.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# config ", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "n,method,bound_r,exponential_count,flag");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
}
