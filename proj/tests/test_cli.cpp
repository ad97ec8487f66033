#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace gaepoison;
using namespace gaepoison::cli;
using namespace fixtures;

namespace {

std::filesystem::path write_config(const std::string& name, const std::string& text) {
  const auto p = temp_dir(name) / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const config_error& e) {
    return e.what();
  }
  return "";
}

/// Runs the command line tool; returns (exit status, stdout + stderr).
std::pair<int, std::string> run_cli(const std::string& args) {
  const std::string cmd = std::string(GAEPOISON_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

RunConfig small_run(const std::string& out) {
  RunConfig c;
  c.data_root = data_root().string();
  c.train_size = 300;
  c.test_size = 100;
  c.T_FL = 3;
  c.T_L = 2;
  c.gae_epochs = 2;
  c.output_dir = out;
  return c;
}

}  // namespace

TEST(ParseConfig, FileThenOverride) {
  const auto p = write_config("cfg_basic", "J=5\nT_L=10\n");
  const RunConfig c = parse_config(p, {{"seed", "7"}});
  EXPECT_EQ(c.J, 5u);
  EXPECT_EQ(c.T_L, 10);
  EXPECT_EQ(c.seed, 7u);
}

TEST(ParseConfig, OverrideBeatsFileAndCommentsAreIgnored) {
  const auto p = write_config("cfg_prec", "# desk run\n  seed = 3   # inline\n\nattack=gae\n");
  const RunConfig c = parse_config(p, {{"seed", "9"}});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.attack, "gae");
}

TEST(ParseConfig, InvariantViolationsCiteLine) {
  const auto p = write_config("cfg_j0", "seed=1\nJ=0\n");
  const auto msg = error_of([&] { parse_config(p); });
  EXPECT_NE(msg.find("J >= 1"), std::string::npos);
  EXPECT_NE(msg.find(":2"), std::string::npos);
  const auto q = write_config("cfg_eaves", "J=5\neavesdrop_count=9\n");
  EXPECT_NE(error_of([&] { parse_config(q); }).find("eavesdrop_count <= J"), std::string::npos);
  EXPECT_NE(error_of([] { parse_config({}, {{"T_FL", "0"}}); }).find("--T_FL"), std::string::npos);
}

TEST(ParseConfig, UnknownKeyAndBadValue) {
  const auto p = write_config("cfg_unknown", "J=5\n\nbogus=1\n");
  const auto msg = error_of([&] { parse_config(p); });
  EXPECT_NE(msg.find("unknown key 'bogus'"), std::string::npos);
  EXPECT_NE(msg.find(":3"), std::string::npos);
  const auto q = write_config("cfg_badval", "eta=fast\n");
  EXPECT_NE(error_of([&] { parse_config(q); }).find(":1: eta"), std::string::npos);
  EXPECT_FALSE(error_of([] { parse_config({}, {{"attack", "gan"}}); }).empty());
  EXPECT_FALSE(error_of([] { parse_config({}, {{"d_T", "wide"}}); }).empty());
  const auto r = write_config("cfg_noeq", "J 5\n");
  EXPECT_NE(error_of([&] { parse_config(r); }).find("key=value"), std::string::npos);
}

TEST(ParseConfig, SnapshotRoundTrip) {
  RunConfig c = parse_config({}, {{"attack", "mp"}, {"eta", "0.125"}, {"d_T", "0.3"}, {"mp_relative", "false"}});
  const auto p = write_config("cfg_snap", snapshot(c));
  const RunConfig back = parse_config(p);
  EXPECT_EQ(snapshot(back), snapshot(c));
  EXPECT_EQ(back.eta, 0.125);
  EXPECT_FALSE(back.mp_relative);
}

TEST(CommandLine, HelpListsEveryKeyWithDefault) {
  const auto [status, out] = run_cli("run --help");
  EXPECT_EQ(status, 0);
  for (const auto& k : config_keys()) {
    EXPECT_NE(out.find("--" + k.name), std::string::npos) << k.name;
    const std::string def = default_value(k);
    if (!def.empty()) {
      EXPECT_NE(out.find(def), std::string::npos) << k.name;
    }
  }
}

TEST(CommandLine, MissingDatasetIsNonzeroAndNamesPath) {
  const auto out_dir = temp_dir("cli_missing");
  const auto [status, out] = run_cli("run --data_root /no/such/root --output_dir " + out_dir.string());
  EXPECT_NE(status, 0);
  EXPECT_NE(out.find("/no/such/root"), std::string::npos);
}

TEST(CommandLine, BadConfigIsNonzero) {
  const auto [status, out] = run_cli("run --J 0");
  EXPECT_NE(status, 0);
  EXPECT_NE(out.find("J >= 1"), std::string::npos);
}

TEST(CommandLine, BoundSubcommand) {
  const auto [status, out] = run_cli("bound --Theta 1 --rho 0.1 --eta 0.1 --D 400 --D_a 100 --F_max 2 --t 3");
  EXPECT_EQ(status, 0);
  EXPECT_NE(out.find("0,1\n"), std::string::npos);
  EXPECT_NE(out.find("stated_gap="), std::string::npos);
}

TEST(Scenario, WritesArtifactsAndIsByteIdentical) {
  const auto dir = temp_dir("scenario");
  RunConfig c = small_run((dir / "a").string());
  c.attack = "gae";
  const auto res = run_scenario(c);
  EXPECT_EQ(res.records.size(), 3u);
  for (const char* f : {"metrics.csv", "config.txt", "summary.json"}) EXPECT_TRUE(std::filesystem::exists(dir / "a" / f));
  c.output_dir = (dir / "b").string();
  run_scenario(c);
  EXPECT_EQ(slurp(dir / "a" / "metrics.csv"), slurp(dir / "b" / "metrics.csv"));
  EXPECT_EQ(parse_config(dir / "a" / "config.txt").seed, c.seed);
  // 5 benign + 1 attacker + 1 global row per round
  EXPECT_EQ(analysis::read_metrics(dir / "a" / "metrics.csv").size(), 21u);
}

TEST(Scenario, MissingDatasetNamesPath) {
  RunConfig c = small_run(temp_dir("scenario_missing").string());
  c.data_root = "/no/such/root";
  try {
    run_scenario(c);
    FAIL();
  } catch (const io_error& e) {
    EXPECT_NE(std::string(e.what()).find("/no/such/root"), std::string::npos);
  }
}

TEST(Scenario, DataRootFromEnvironment) {
  RunConfig c;
  c.data_root.clear();
  setenv(kDataRootEnv, "/from/env", 1);
  EXPECT_EQ(c.resolved_data_root(), std::filesystem::path("/from/env"));
  unsetenv(kDataRootEnv);
  EXPECT_EQ(c.resolved_data_root(), std::filesystem::path("data"));
}

TEST(Scenario, SweepWritesOnePointPerValue) {
  const auto dir = temp_dir("sweep");
  RunConfig c = small_run(dir.string());
  c.T_FL = 2;
  c.attack = "mp";
  const auto pts = run_sweep(c, "eavesdrop_count", {"3", "5"});
  EXPECT_EQ(pts.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "eavesdrop_count_3" / "metrics.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "eavesdrop_count_5" / "metrics.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "sweep.csv"));
}
