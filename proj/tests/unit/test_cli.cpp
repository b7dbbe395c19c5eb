#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "helpers.hpp"

namespace pwl {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pwl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pwl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }

  std::string read(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  std::string fixture_config() {
    Json cfg{{"params", test::load_fixture("case1_two_cycles.json").at("best").at("params")}};
    return write("fixture.json", cfg.dump());
  }

  fs::path dir_;
};

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::istringstream ls(line);
    std::string cell;
    for (int i = 0; i < 3 && std::getline(ls, cell, ','); ++i) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

TEST_F(CliTest, ClassifyEscapingSegment) {
  const auto r = run({"classify", "--b", "2", "--c", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  const auto& segs = j.at("boundary").at("sliding_segments");
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].at("label"), "ESCAPING");
  EXPECT_EQ(segs[0].at("lo").get<double>(), 0.0);
  EXPECT_EQ(segs[0].at("hi").get<double>(), 2.0);
  EXPECT_EQ(j.at("equilibria").at("right").at("x").get<double>(), 0.0);
  EXPECT_EQ(j.at("equilibria").at("right").at("y").get<double>(), 2.0);
  EXPECT_TRUE(j.at("equilibria").at("right").at("on_boundary").get<bool>());
}

TEST_F(CliTest, ClassifyWithoutSlidingSegment) {
  const auto r = run({"classify", "--b", "0"});
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j.at("boundary").at("sliding_segments").empty());
  EXPECT_EQ(j.at("boundary").at("tangency_points"), Json::array({0.0}));
}

TEST_F(CliTest, MalformedJsonIsAConfigError) {
  const auto r = run({"classify", "--config", write("bad.json", "{\"params\": {\"b\": 2,")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("malformed JSON"), std::string::npos);
}

TEST_F(CliTest, UnknownKeyIsAConfigError) {
  EXPECT_EQ(run({"classify", "--config", write("k.json", R"({"params": {"bb": 2}})")}).code, 2);
  EXPECT_EQ(run({"classify", "--config", write("k2.json", R"({"paramz": {}})")}).code, 2);
  EXPECT_EQ(run({"classify", "--config", (dir_ / "missing.json").string()}).code, 2);
}

TEST_F(CliTest, InvalidParamsAreAConfigError) {
  EXPECT_EQ(run({"cycles", "--left-class", "dnode", "--ell", "0"}).code, 2);
  EXPECT_EQ(run({"cycles", "--left-class", "star"}).code, 2);
  EXPECT_EQ(run({"cycles", "--method", "magic"}).code, 2);
}

TEST_F(CliTest, FlagsOverrideConfig) {
  const auto path = write("c.json", R"({"params": {"b": 5}})");
  const Json j = Json::parse(run({"classify", "--config", path, "--b", "-1"}).out);
  EXPECT_EQ(j.at("params").at("b").get<double>(), -1.0);
}

TEST_F(CliTest, CyclesOnFixture) {
  const auto r = run({"cycles", "--config", fixture_config()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("count"), 2);
  EXPECT_EQ(j.at("branch"), "CASE1_C0");
  for (const auto& c : j.at("cycles")) EXPECT_LT(c.at("residuals").at("e3").get<double>(), 1e-8);
}

TEST_F(CliTest, CyclesNodeOnBoundary) {
  const auto r = run({"cycles", "--left-class", "saddle_node", "--ell", "0.5", "--a", "0", "--b", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("count"), 0);
  EXPECT_TRUE(j.at("obstructed").get<bool>());
}

TEST_F(CliTest, CyclesBothCentersIsContinuum) {
  const Json j = Json::parse(run({"cycles"}).out);
  EXPECT_EQ(j.at("count"), 0);
  EXPECT_TRUE(j.at("continuum").get<bool>());
  EXPECT_NE(j.at("note").get<std::string>().find("CONTINUUM"), std::string::npos);
}

TEST_F(CliTest, PortraitZeroSpan) {
  const auto r = run({"portrait", "--y0", "-2", "--t-span", "0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "t,x,y,piece\n0,0,-2,R\n");
}

TEST_F(CliTest, PortraitOverOnePeriodCloses) {
  const auto rep = Json::parse(run({"cycles", "--config", fixture_config()}).out);
  for (const auto& c : rep.at("cycles")) {
    const double y0 = c.at("y0").get<double>();
    const double period = c.at("period").get<double>();
    char ys[64], ts[64];
    std::snprintf(ys, sizeof ys, "%.17g", y0);
    std::snprintf(ts, sizeof ts, "%.17g", period);
    const auto r = run({"portrait", "--config", fixture_config(), "--y0", ys, "--t-span", ts, "--dt", "0.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_GT(rows.size(), 10u);
    EXPECT_EQ(rows.back()[0], period);
    const double scale = std::max(1.0, std::abs(y0));
    EXPECT_NEAR(rows.back()[1], rows.front()[1], 1e-6 * scale);
    EXPECT_NEAR(rows.back()[2], rows.front()[2], 1e-6 * scale);
  }
}

TEST_F(CliTest, PortraitRowsFollowTheGrid) {
  const auto r = run({"portrait", "--y0", "-1", "--t-span", "1", "--dt", "0.25"});
  ASSERT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_DOUBLE_EQ(rows[i][0], 0.25 * i);
  EXPECT_NEAR(rows[4][1], std::sin(1.0), 1e-14);
}

TEST_F(CliTest, PortraitSlidingContact) {
  const auto r = run({"portrait", "--y0", "-3", "--b", "-1", "--ell", "-1", "--t-span", "20"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("sliding contact"), std::string::npos);
  const auto rows = csv_rows(r.out);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.back()[1], 0.0);
  EXPECT_GE(rows.back()[2], -1.0);
  EXPECT_LE(rows.back()[2], 0.0);
}

TEST_F(CliTest, PortraitStartInEscapingSegment) {
  EXPECT_EQ(run({"portrait", "--y0", "1", "--b", "2"}).code, 3);
}

TEST_F(CliTest, PortraitRejectsBadStep) {
  EXPECT_EQ(run({"portrait", "--dt", "0"}).code, 2);
  EXPECT_EQ(run({"portrait", "--t-span", "-1"}).code, 2);
}

TEST_F(CliTest, WronskianVerdicts) {
  const Json ect = Json::parse(run({"wronskian", "--family", "CASE2", "--ell", "1", "--lo", "0.1", "--hi", "10"}).out);
  EXPECT_EQ(ect.at("verdict"), "ECT");
  EXPECT_EQ(ect.at("levels").size(), 4u);
  const Json not_ect = Json::parse(run({"wronskian", "--family", "CASE3", "--ell", "0"}).out);
  EXPECT_EQ(not_ect.at("verdict"), "NOT_ECT");
}

TEST_F(CliTest, WronskianGridTooSmall) {
  EXPECT_EQ(run({"wronskian", "--family", "CASE2", "--grid", "99"}).code, 2);
  EXPECT_EQ(run({"wronskian", "--family", "CASE2", "--lo", "1"}).code, 2);
}

TEST_F(CliTest, SweepAndSearchAreByteIdentical) {
  const std::vector<std::string> sweep_args{"sweep", "--family", "case1_c0", "--samples", "200", "--seed", "5"};
  const auto s1 = run(sweep_args), s2 = run(sweep_args);
  ASSERT_EQ(s1.code, 0) << s1.err;
  EXPECT_EQ(s1.out, s2.out);
  EXPECT_EQ(Json::parse(s1.out).at("samples"), 200);
  const std::vector<std::string> search_args{"search", "--family", "case1_c0", "--budget", "300", "--seed", "5"};
  const auto a1 = run(search_args), a2 = run(search_args);
  ASSERT_EQ(a1.code, 0) << a1.err;
  EXPECT_EQ(a1.out, a2.out);
}

TEST_F(CliTest, SweepRejectsZeroSamples) {
  EXPECT_EQ(run({"sweep", "--samples", "0"}).code, 2);
  EXPECT_EQ(run({"sweep", "--family", "nope"}).code, 2);
}

TEST_F(CliTest, SearchZeroBudgetHasNoBest) {
  const auto r = run({"search", "--budget", "0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(Json::parse(r.out).at("best").is_null());
}

TEST_F(CliTest, OutputFileAndIndent) {
  const auto path = (dir_ / "report.json").string();
  const auto r = run({"classify", "--b", "2", "--out", path, "--json-indent", "-1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  const std::string text = read(path);
  EXPECT_EQ(text.find("\n  "), std::string::npos);
  EXPECT_EQ(Json::parse(text).at("sliding_set"), Json::array({0.0, 2.0}));
}

TEST_F(CliTest, HelpAndUsage) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

}  // namespace
}  // namespace pwl
