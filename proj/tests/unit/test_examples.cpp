#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hilbertctl/errors.hpp"
#include "hilbertctl/examples.hpp"

using namespace hilbertctl;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hilbertctl_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Compare, CheckKinds) {
  EXPECT_TRUE(compare("a", 1.0, 1.05, 0.1).pass);
  EXPECT_FALSE(compare("a", 1.0, 1.2, 0.1).pass);
  EXPECT_TRUE(compare("r", 100.0, 100.9, 0.01, Check::kRelative).pass);
  EXPECT_FALSE(compare("r", 100.0, 102.0, 0.01, Check::kRelative).pass);
  EXPECT_TRUE(compare("m", 1.0, 5.0, 0.0, Check::kAtLeast).pass);
  EXPECT_FALSE(compare("m", 1.0, 0.5, 0.1, Check::kAtLeast).pass);
}

TEST(Outputs, EmptyResultWritesOnlyReport) {
  const fs::path dir = fresh_dir("empty");
  const auto files = emit_outputs(RunResult{}, dir.string());
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0], "report.json");
  EXPECT_EQ(slurp(dir / "report.json"), "{}\n");
  fs::remove_all(dir);
}

TEST(Outputs, UnwritableDirectoryThrows) {
  const fs::path file = fresh_dir("blocker");
  std::ofstream(file.string()) << "x";
  EXPECT_THROW(emit_outputs(RunResult{}, (file / "sub").string()), IOError);
  fs::remove_all(file);
}

TEST(Examples, OutputsAreByteIdenticalAcrossRuns) {
  ExampleOptions o;
  o.dim = 16;
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  const auto fa = emit_outputs(to_run_result(run_example("ex4", o)), a.string());
  o.workers = 3;
  const auto fb = emit_outputs(to_run_result(run_example("ex4", o)), b.string());
  ASSERT_EQ(fa, fb);
  for (const auto& f : fa) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Examples, UnknownIdIsParseError) {
  EXPECT_THROW(run_example("ex9"), ParseError);
}

TEST(Examples, ResolutionBelowMinimum) {
  ExampleOptions o;
  o.dim = kEx3MinDim - 1;
  EXPECT_THROW(run_example("ex3", o), ResolutionError);
  o.dim = kEx4MinDim - 1;
  EXPECT_THROW(run_example("ex4", o), ResolutionError);
  o.dim = kEx2MinModes - 1;
  EXPECT_THROW(run_example("ex2", o), ResolutionError);
  Ex1Params p;
  p.spacing = 2 * kEx1MaxSpacing;
  p.half_width = 10.0;
  EXPECT_THROW(example1_problem(p), ResolutionError);
}

TEST(Examples, HeatExampleWritesOneTablePerCase) {
  ExampleOptions o;
  o.dim = 16;
  const ExampleReport r = run_example("ex2", o);
  int figs = 0;
  for (const auto& t : r.tables) figs += t.name.rfind("fig2_case", 0) == 0;
  EXPECT_EQ(figs, 3);
}

TEST(Examples, Ex3AndEx4PassAllComparisons) {
  for (const char* id : {"ex3", "ex4"}) {
    const ExampleReport r = run_example(id);
    for (const auto& c : r.comparisons) {
      EXPECT_TRUE(c.pass) << id << ": " << c.name << " computed " << c.computed
                          << " reference " << c.reference;
    }
  }
}

TEST(Examples, Ex4ReportsClosedFormGains) {
  const ExampleReport r = run_example("ex4");
  EXPECT_NEAR(r.computed.at("closed_form").at("upsilon1").get<double>(), 0.1, 1e-15);
  EXPECT_NEAR(r.computed.at("closed_form").at("upsilon2").get<double>(), -0.4, 1e-15);
  EXPECT_NEAR(r.computed.at("J2").get<double>(), 2.74, 1e-10);
}

TEST(Examples, IdsAreListed) {
  const auto ids = example_ids();
  EXPECT_NE(std::find(ids.begin(), ids.end(), "ex2-case3"), ids.end());
  EXPECT_EQ(ids.size(), 7u);
}

TEST(Examples, Ex4DefaultIsTwoAndZero) {
  const ExampleReport r = run_example("ex4");
  EXPECT_EQ(r.parameters.at("gamma").get<double>(), 2.0);
  EXPECT_EQ(r.parameters.at("rho").get<double>(), 0.0);
}
