#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hdmi_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(HDMI_CLI_PATH) + " " + args + " >" + path("stdout.txt") + " 2>" +
                            path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string stderr_text() const { return slurp(path("stderr.txt")); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  std::vector<std::string> lines(const std::string& name) const {
    std::istringstream in(slurp(path(name)));
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }

  // y, a = y, b = noise, c = constant.
  void write_tiny_fixture(const std::string& name) const {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d(0.0, 1.0);
    std::ostringstream csv;
    csv << "y,a,b,c\n";
    for (int i = 0; i < 120; ++i) {
      const double y = d(rng);
      csv << y << ',' << y << ',' << d(rng) << ",1\n";
    }
    write(name, csv.str());
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ScreenTinyFixture) {
  write_tiny_fixture("tiny.csv");
  for (const char* method : {"fftkde", "binning", "knn", "pearson"}) {
    const std::string out = path(std::string("report_") + method + ".csv");
    ASSERT_EQ(run("screen --input " + path("tiny.csv") + " --outcome-col y --method " + method + " --output " + out +
                  " --json " + out + ".json"),
              0)
        << stderr_text();
    const auto rows = lines(std::string("report_") + method + ".csv");
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], "index,name,score,raw,n_used,flag");
    EXPECT_EQ(rows[3].substr(0, 4), "3,c,");
    EXPECT_NE(rows[3].find("constant"), std::string::npos);
    EXPECT_FALSE(stderr_text().empty());
    EXPECT_TRUE(fs::exists(out + ".timing.json"));
    const auto json = nlohmann::json::parse(slurp(out + ".json"));
    EXPECT_EQ(json["features"].size(), 3u);
  }
}

TEST_F(Cli, ScreenIsReproducibleAcrossWorkers) {
  write_tiny_fixture("tiny.csv");
  ASSERT_EQ(run("generate --rows 200 --cols 60 --seed 3 --output " + path("g.csv")), 0) << stderr_text();
  ASSERT_EQ(run("screen --input " + path("g.csv") + " --outcome-col 0 --method knn --seed 5 --workers 1 --output " +
                path("w1.csv")),
            0);
  ASSERT_EQ(run("screen --input " + path("g.csv") + " --outcome-col 0 --method knn --seed 5 --workers 4 --output " +
                path("w4.csv")),
            0);
  EXPECT_EQ(slurp(path("w1.csv")), slurp(path("w4.csv")));
}

TEST_F(Cli, BinaryMatrixInputMatchesCsv) {
  ASSERT_EQ(run("generate --rows 150 --cols 20 --seed 4 --output " + path("g.csv")), 0);
  ASSERT_EQ(run("convert --input " + path("g.csv") + " --output " + path("g.bin")), 0) << stderr_text();
  ASSERT_EQ(run("screen --input " + path("g.csv") + " --outcome-col x0 --output " + path("a.csv")), 0);
  ASSERT_EQ(run("screen --input " + path("g.bin") + " --outcome-col x0 --output " + path("b.csv")), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, UnknownMethodIsUsageError) {
  write_tiny_fixture("tiny.csv");
  EXPECT_EQ(run("screen --input " + path("tiny.csv") + " --method magic --output " + path("r.csv")), 1);
  EXPECT_FALSE(stderr_text().empty());
  EXPECT_EQ(run("screen --input " + path("tiny.csv") + " --outcome-col nope --output " + path("r.csv")), 1);
  EXPECT_EQ(run("frobnicate"), 1);
}

TEST_F(Cli, ThreeValuedBinaryOutcomeIsDataError) {
  write("three.csv", "y,x\n0,1.5\n1,2.5\n2,0.5\n0,3.5\n1,1.0\n2,2.0\n");
  EXPECT_EQ(run("screen --input " + path("three.csv") + " --outcome-col y --outcome-type binary --output " +
                path("r.csv")),
            2);
  EXPECT_EQ(stderr_text().find("terminate"), std::string::npos);
}

TEST_F(Cli, MalformedCsvIsDataError) {
  write("bad.csv", "y,x\n1,2\n3\n");
  EXPECT_EQ(run("screen --input " + path("bad.csv") + " --output " + path("r.csv")), 2);
  EXPECT_NE(stderr_text().find("line 3"), std::string::npos);
}

TEST_F(Cli, SimulateIsDeterministic) {
  ASSERT_EQ(run("generate --rows 300 --cols 80 --seed 2 --output " + path("design.csv")), 0);
  for (const char* out : {"s1.csv", "s2.csv"}) {
    ASSERT_EQ(run("simulate --design " + path("design.csv") +
                  " --p-true 10 --mode nonlinear --outcome continuous --seed 7 --output " + path(out)),
              0)
        << stderr_text();
  }
  EXPECT_EQ(slurp(path("s1.csv")), slurp(path("s2.csv")));
  EXPECT_EQ(slurp(path("s1.csv.truth.csv")), slurp(path("s2.csv.truth.csv")));
  EXPECT_EQ(slurp(path("s1.csv.json")), slurp(path("s2.csv.json")));
  EXPECT_EQ(lines("s1.csv").size(), 301u);
  EXPECT_EQ(lines("s1.csv.truth.csv").size(), 11u);
  const auto meta = nlohmann::json::parse(slurp(path("s1.csv.json")));
  EXPECT_EQ(meta["support"].size(), 10u);
}

TEST_F(Cli, ScreenSimulatedOutcomeThenEvaluate) {
  ASSERT_EQ(run("generate --rows 400 --cols 100 --seed 8 --output " + path("design.csv")), 0);
  ASSERT_EQ(run("simulate --design " + path("design.csv") +
                " --p-true 5 --mode linear --outcome continuous --per-observation-snr --seed 9 --output " +
                path("y.csv")),
            0);
  ASSERT_EQ(run("screen --input " + path("design.csv") + " --outcome-file " + path("y.csv") +
                " --method pearson --output " + path("scores.csv")),
            0)
      << stderr_text();
  ASSERT_EQ(run("evaluate --scores " + path("scores.csv") + " --truth " + path("y.csv.truth.csv") + " --k 5 --output " +
                path("eval.csv")),
            0)
      << stderr_text();
  const auto rows = lines("eval.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "auroc,features,true_features,k,true_positives,false_positives,false_negatives");
  EXPECT_GT(std::stod(rows[1].substr(0, rows[1].find(','))), 0.8);
}

TEST_F(Cli, EvaluatePerfectRankingIsOne) {
  write("scores.csv", "index,name,score,raw,n_used,flag\n0,a,0.9,0.9,10,ok\n1,b,0.8,0.8,10,ok\n2,c,0.1,0.1,10,ok\n"
                      "3,d,0.05,0.05,10,ok\n");
  write("truth.csv", "index,name,beta\n0,a,1.2\n1,b,0.7\n");
  ASSERT_EQ(run("evaluate --scores " + path("scores.csv") + " --truth " + path("truth.csv") + " --output " +
                path("e.csv")),
            0)
      << stderr_text();
  EXPECT_EQ(lines("e.csv").at(1), "1,4,2");
}

TEST_F(Cli, EvaluateSingleClassTruthIsDataError) {
  write("scores.csv", "index,name,score,raw,n_used,flag\n0,a,0.9,0.9,10,ok\n1,b,0.8,0.8,10,ok\n");
  write("truth.csv", "index,name,beta\n0,a,1.2\n1,b,0.7\n");
  EXPECT_EQ(run("evaluate --scores " + path("scores.csv") + " --truth " + path("truth.csv") + " --output " +
                path("e.csv")),
            2);
  write("missing.csv", "index,name,beta\n0,zz,1.2\n");
  EXPECT_EQ(run("evaluate --scores " + path("scores.csv") + " --truth " + path("missing.csv") + " --output " +
                path("e.csv")),
            2);
}

TEST_F(Cli, BenchTimesGrowWithFraction) {
  ASSERT_EQ(run("generate --rows 400 --cols 401 --seed 10 --output " + path("design.csv")), 0);
  ASSERT_EQ(run("bench --input " + path("design.csv") +
                " --outcome-col 0 --methods fftkde,pearson --fractions 0.25,1.0 --replications 2 --output " +
                path("bench.csv")),
            0)
      << stderr_text();
  const auto rows = lines("bench.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "method,fraction,columns,mean_seconds,ci_half_width,replications");
  auto field = [](const std::string& row, int index) {
    std::istringstream in(row);
    std::string f;
    for (int i = 0; i <= index; ++i) std::getline(in, f, ',');
    return f;
  };
  EXPECT_EQ(field(rows[1], 2), "100");
  EXPECT_EQ(field(rows[2], 2), "400");
  EXPECT_GE(std::stod(field(rows[2], 3)), std::stod(field(rows[1], 3)));
  EXPECT_EQ(field(rows[1], 0), "fftkde");
  EXPECT_EQ(field(rows[3], 0), "pearson");
}

TEST_F(Cli, BenchRejectsBadArguments) {
  write_tiny_fixture("tiny.csv");
  EXPECT_EQ(run("bench --input " + path("tiny.csv") + " --replications 0 --output " + path("b.csv")), 1);
  EXPECT_EQ(run("bench --input " + path("tiny.csv") + " --fractions 1.5 --output " + path("b.csv")), 1);
}

TEST_F(Cli, WorkersFromEnvironment) {
  write_tiny_fixture("tiny.csv");
  ASSERT_EQ(run("screen --input " + path("tiny.csv") + " --output " + path("r.csv")), 0);
  const std::string cmd = "HDMI_WORKERS=3 " + std::string(HDMI_CLI_PATH) + " screen --input " + path("tiny.csv") +
                          " --output " + path("r3.csv") + " 2>/dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(path("r.csv")), slurp(path("r3.csv")));
  const auto timing = nlohmann::json::parse(slurp(path("r3.csv.timing.json")));
  EXPECT_TRUE(timing.contains("seconds"));
}
