#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "fixtures.hpp"
#include "mirp_io/io.hpp"
#include "oracle.hpp"

using namespace mirp;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mirp_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  CliRun run(const std::string& args) const {
    const std::string out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string(MIRP_CLI) + " " + args + " > " + out + " 2> " + err;
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path dir_;
};

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

// t,y rows after the header
std::vector<std::pair<double, double>> solution_rows(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  const auto lines = data_lines(text);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto comma = lines[i].find(',');
    out.emplace_back(io::parse_double(lines[i].substr(0, comma)), io::parse_double(lines[i].substr(comma + 1)));
  }
  return out;
}

std::string samples_text(const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  io::write_samples_csv(os, rows);
  return os.str();
}

const char* kLinearField = R"J({"d":1,"fields":[{"i":0,"coeffs":["0","0.4"]},{"i":1,"coeffs":["0","-0.9"]}]})J";

std::vector<std::vector<double>> linear_rows() {
  std::vector<std::vector<double>> rows;
  for (int j = 0; j <= 16; ++j) rows.push_back({j / 16.0, 1.7 * (j / 16.0)});
  return rows;
}

}  // namespace

// ---------------------------------------------------------------- I/O library

TEST(IoTest, DoubleTextRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int n = 0; n < 2000; ++n) {
    double x;
    const std::uint64_t b = bits(rng);
    std::memcpy(&x, &b, sizeof x);
    if (!std::isfinite(x)) continue;
    EXPECT_EQ(io::parse_double(io::format_double(x)), x);
  }
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(-2.5e-300), "-2.5e-300");
  EXPECT_THROW(io::parse_double("1,5"), InvalidInput);
  EXPECT_THROW(io::parse_double(""), InvalidInput);
}

TEST(IoTest, ExactNumbers) {
  EXPECT_EQ(io::parse_exact("-0.9"), Rational(-9, 10));
  EXPECT_EQ(io::parse_exact("3/6"), Rational(1, 2));
  EXPECT_EQ(io::parse_exact("1e-3"), Rational(1, 1000));
  EXPECT_EQ(io::parse_exact("08"), Rational(8));
  EXPECT_THROW(io::parse_exact("x"), InvalidInput);
}

TEST(IoTest, GridJsonRoundTripIsBitExact) {
  const Grading g(3, Rational(1, 3));
  BrownianConfig cfg;
  cfg.d = 2;
  cfg.n_steps = 64;
  cfg.seed = 9;
  cfg.stride = 8;
  const RoughPathGrid p = lift_brownian(cfg, g);
  const RoughPathGrid back = io::grid_from_json(io::Json::parse(io::to_json(p).dump()));
  EXPECT_TRUE(back == p);
}

TEST(IoTest, GridJsonRejectsBadInput) {
  io::Json j = io::to_json(fixture::sine_path(2, Grading(2, Rational(1, 2))));
  io::Json bad = j;
  bad["increments"][0]["z(3,0)"] = 1.0;
  EXPECT_THROW(io::grid_from_json(bad), InvalidInput);
  bad = j;
  bad["gamma"] = "3/2";
  EXPECT_THROW(io::grid_from_json(bad), InvalidInput);
  bad = j;
  bad.erase("times");
  EXPECT_THROW(io::grid_from_json(bad), InvalidInput);
  bad = j;
  bad["increments"][0]["z(1,0)z(1,1)^5"] = 1.0;
  EXPECT_THROW(io::grid_from_json(bad), InvalidInput);
}

TEST(IoTest, SamplesCsv) {
  const auto rows = fixture::sine_samples(4);
  std::istringstream in("# comment\n" + samples_text(rows));
  EXPECT_EQ(io::read_samples_csv(in), rows);
  std::istringstream bad_header("t,y\n0,1\n");
  EXPECT_THROW(io::read_samples_csv(bad_header), InvalidInput);
  std::istringstream ragged("t,x1\n0,1\n1\n");
  EXPECT_THROW(io::read_samples_csv(ragged), InvalidInput);
}

TEST(IoTest, FieldJson) {
  const PolynomialField f = fixture::cos_field();
  const PolynomialField back = io::field_from_json(io::Json::parse(io::to_json(f).dump()));
  EXPECT_EQ(back.fields(), f.fields());
  const auto partial = io::field_from_json(io::Json::parse(R"J({"d":2,"fields":[{"i":1,"coeffs":["1/3", 2]}]})J"));
  EXPECT_EQ(partial.fields()[0], Polynomial());
  EXPECT_EQ(partial.fields()[1], Polynomial({Rational(1, 3), Rational(2)}));
  EXPECT_THROW(io::field_from_json(io::Json::parse(R"J({"d":1,"fields":[{"i":2,"coeffs":[]}]})J")), InvalidInput);
}

TEST(IoTest, CharacterJson) {
  const Character c = ito_strat_character(2);
  const Character back = io::character_from_json(io::Json::parse(io::to_json(c).dump()));
  EXPECT_EQ(back.direction, c.direction);
  EXPECT_EQ(back.values, c.values);
  const Translation ell =
      io::translation_from_json(io::Json::parse(R"J([{"direction":0,"terms":{"z(1,0)z(1,1)":"1/2","z(2,0)z(2,1)":"1/2"}}])J"));
  EXPECT_EQ(ell.d(), 2u);
  EXPECT_EQ(ell[0](parse_multi_index("z(1,0)z(1,1)")), Rational(1, 2));
}

// ---------------------------------------------------------------- CLI

TEST_F(CliTest, EnumerateCounts) {
  for (unsigned n = 1; n <= 3; ++n) {
    const CliRun r = run("enumerate --d 1 --max-norm " + std::to_string(n));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(data_lines(r.out).size(), oracle::naive_populated(1, static_cast<int>(n)).size());
  }
  EXPECT_EQ(data_lines(run("enumerate --d 1 --max-norm 2").out).size(), 6u);
  EXPECT_EQ(data_lines(run("enumerate --d 1 --max-norm 1").out).size(), 2u);
  const CliRun empty = run("enumerate --d 2 --max-norm 0");
  EXPECT_EQ(empty.code, 0);
  EXPECT_TRUE(empty.out.empty());
  const CliRun g = run("enumerate --d 1 --max-norm 1 --gamma 1/3");
  EXPECT_NE(g.out.find("z(0,0)\t1\t3\t1\tpopulated"), std::string::npos) << g.out;
}

TEST_F(CliTest, VerifyDegenerateAndFault) {
  const CliRun ok = run("verify --d 2 --max-norm 1 --no-timestamp");
  EXPECT_EQ(ok.code, 0) << ok.err;
  const auto j = io::Json::parse(ok.out);
  EXPECT_TRUE(j["ok"].get<bool>());
  EXPECT_FALSE(j["suites"].empty());
  const CliRun bad = run("verify --d 2 --max-norm 3 --inject-fault --no-timestamp");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("z(0,0) | z(0,0) | z(0,0)"), std::string::npos) << bad.err;
}

TEST_F(CliTest, LiftThenSolveMatchesInProcess) {
  const auto rows = fixture::sine_samples(6);
  write("s.csv", samples_text(rows));
  write("f.json", io::to_json(fixture::cos_field()).dump());
  ASSERT_EQ(run("lift --samples " + path("s.csv") + " --d 1 --gamma 1/2 --max-norm 2 --out " + path("p.json")).code, 0);
  const CliRun r = run("solve --path " + path("p.json") + " --field " + path("f.json") + " --y0 0.3 --mesh-level 5");
  ASSERT_EQ(r.code, 0) << r.err;
  SolveConfig cfg;
  cfg.mesh_level = 5;
  const FlowSolution want =
      solve_flow(lift_piecewise_linear(rows, Grading(2, Rational(1, 2))), fixture::cos_field(), 0.3, cfg);
  const auto got = solution_rows(r.out);
  ASSERT_EQ(got.size(), want.values.size());
  for (std::size_t j = 0; j < got.size(); ++j) {
    EXPECT_EQ(got[j].first, want.times[j]);
    EXPECT_EQ(got[j].second, want.values[j]);
  }
}

TEST_F(CliTest, SolveLinearFixture) {
  write("s.csv", samples_text(linear_rows()));
  write("f.json", kLinearField);
  ASSERT_EQ(run("lift --samples " + path("s.csv") + " --d 1 --out " + path("p.json")).code, 0);
  const CliRun r = run("solve --path " + path("p.json") + " --field " + path("f.json") + " --y0 1.5 --sidecar " +
                    path("side.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(solution_rows(r.out).back().second, 1.5 * std::exp(0.4 - 0.9 * 1.7), 1e-8);
  const auto side = io::read_json_file(path("side.json"));
  EXPECT_FALSE(side["truncated"].get<bool>());
  EXPECT_TRUE(side["davie"].contains("slope"));
  EXPECT_NE(r.out.find("# command: solve"), std::string::npos);
}

TEST_F(CliTest, DavieReportSmoothFixture) {
  write("s.csv", samples_text(fixture::sine_samples(10)));
  write("f.json", io::to_json(fixture::cos_field()).dump());
  ASSERT_EQ(run("lift --samples " + path("s.csv") + " --d 1 --gamma 1/2 --max-norm 2 --out " + path("p.json")).code, 0);
  const CliRun r = run("davie-report --path " + path("p.json") + " --field " + path("f.json") +
                    " --y0 0.3 --coarsest 2 --finest 8");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::Json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["target"].get<double>(), 1.5);
  EXPECT_GE(j["slope"].get<double>(), 1.35);
  EXPECT_EQ(j["scales"].size(), 7u);
}

TEST_F(CliTest, DivergenceExitCode) {
  write("s.csv", samples_text({{0, 0}, {0.5, 2}, {1, 4}}));
  write("f.json", R"J({"d":1,"fields":[{"i":1,"coeffs":[0,0,1]}]})J");
  ASSERT_EQ(run("lift --samples " + path("s.csv") + " --d 1 --out " + path("p.json")).code, 0);
  const CliRun r = run("solve --path " + path("p.json") + " --field " + path("f.json") + " --y0 1");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("diverged"), std::string::npos) << r.err;
  EXPECT_EQ(solution_rows(r.out).size(), 1u);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("enumerate --d 1 --max-norm 2 --gamma 3/2").code, 2);
  const CliRun missing = run("solve --path " + path("nope.json") + " --field " + path("nope.json"));
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("cannot open"), std::string::npos);
  EXPECT_EQ(run("lift --d 1 --max-norm 4 --brownian").code, 2);
  EXPECT_EQ(run("--version").code, 0);
}

TEST_F(CliTest, DeterministicBytes) {
  const std::string args = "lift --brownian --d 2 --gamma 1/3 --max-norm 3 --n-steps 256 --stride 16 --seed 42 "
                           "--mode ito --no-timestamp";
  const CliRun a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.find("timestamp"), std::string::npos);
  EXPECT_NE(run("lift --brownian --d 1 --n-steps 16").out.find("timestamp"), std::string::npos);
  BrownianConfig cfg;
  cfg.d = 2;
  cfg.n_steps = 256;
  cfg.stride = 16;
  cfg.seed = 42;
  cfg.mode = BrownianMode::ito;
  EXPECT_TRUE(io::grid_from_json(io::Json::parse(a.out)) == lift_brownian(cfg, Grading(3, Rational(1, 3))));
}

TEST_F(CliTest, TranslateField) {
  write("f.json", R"J({"d":1,"fields":[{"i":0,"coeffs":[0,"0.1"]},{"i":1,"coeffs":[0,"1/4"]}]})J");
  write("l.json", io::Json::array({io::to_json(ito_strat_character(1))}).dump());
  const CliRun r = run("translate-field --field " + path("f.json") + " --translation " + path("l.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const PolynomialField g = io::field_from_json(io::Json::parse(r.out));
  // μ + σ²/2 = 1/10 + 1/32
  EXPECT_EQ(g.fields()[0], Polynomial({Rational(0), Rational(21, 160)}));
  EXPECT_EQ(g.fields()[1], Polynomial({Rational(0), Rational(1, 4)}));
}

TEST_F(CliTest, TranslatePath) {
  write("s.csv", samples_text(fixture::sine_samples(3)));
  ASSERT_EQ(run("lift --samples " + path("s.csv") + " --d 1 --gamma 1/2 --max-norm 2 --out " + path("p.json")).code, 0);
  write("id.json", R"J({"d":1,"characters":[]})J");
  const CliRun r = run("translate --path " + path("p.json") + " --translation " + path("id.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(io::grid_from_json(io::Json::parse(r.out)) == io::grid_from_json(io::read_json_file(path("p.json"))));
  write("bad.json", R"J({"d":1,"characters":[{"direction":0,"terms":{"z(1,0)z(1,1)^2":"1"}}]})J");
  const CliRun short_path = run("translate --path " + path("p.json") + " --translation " + path("bad.json"));
  EXPECT_EQ(short_path.code, 2);
  EXPECT_NE(short_path.err.find("needs degree"), std::string::npos) << short_path.err;
}

TEST_F(CliTest, ItoStratDemoTable) {
  const CliRun r = run("ito-strat-demo --d 1 --paths 2000 --n-steps 1024 --checkpoints 4 --seed 5 --no-timestamp");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "t,i,j,mean,se,expected");
  for (std::size_t k = 1; k < lines.size(); ++k) {
    std::vector<double> cells;
    std::stringstream ss(lines[k]);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(io::parse_double(c));
    ASSERT_EQ(cells.size(), 6u);
    EXPECT_DOUBLE_EQ(cells[5], cells[0] / 2);
    EXPECT_LE(std::abs(cells[3] - cells[5]), 4 * cells[4]) << lines[k];
  }
}
