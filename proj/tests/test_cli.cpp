#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "eaco/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "eaco");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = eaco::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string &text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

class Scratch : public ::testing::Test {
protected:
    fs::path dir;
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("eaco_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
};

} // namespace

TEST(Cli, RunPrintsOneRow) {
    const auto r = cli({"run", "--instance", "bays29.tsp", "--variant", "dea", "--classifier", "mets", "--seeds",
                        "1", "--iters", "50"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0], eaco::csv_header);
    EXPECT_EQ(l[1].rfind("bays29,DEAMed,", 0), 0u) << l[1];
    EXPECT_NE(l[1].find(",10,1"), std::string::npos);
}

TEST(Cli, ClassifierWithStaticVariantIsUsageError) {
    const auto r = cli({"run", "--instance", "bays29", "--classifier", "mrts", "--variant", "as"});
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.err.find("usage"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, DynamicVariantNeedsClassifier) {
    EXPECT_EQ(cli({"run", "--instance", "bays29", "--variant", "dra"}).status, 2);
}

TEST(Cli, BadFlagValues) {
    EXPECT_NE(cli({"run", "--instance", "bays29", "--variant", "dea", "--classifier", "mode"}).status, 0);
    EXPECT_NE(cli({"run", "--instance", "bays29", "--variant", "nope"}).status, 0);
    EXPECT_NE(cli({"run", "--instance", "bays29", "--variant", "ea", "--format", "xml"}).status, 0);
    EXPECT_NE(cli({"run", "--instance", "bays29", "--variant", "ea", "--rho", "1.5", "--iters", "5"}).status, 0);
    EXPECT_NE(cli({"run", "--variant", "ea"}).status, 0);
    EXPECT_EQ(cli({"run", "--instance", "no_such_instance", "--variant", "ea"}).status, 1);
    EXPECT_NE(cli({}).status, 0);
}

TEST(Cli, JsonFormat) {
    const auto r = cli({"run", "--instance", "eil51", "--variant", "mmas", "--iters", "20", "--format", "json"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto rows = eaco::rows_from_json(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].algorithm, "MMAS+IB+PTS");
    EXPECT_EQ(rows[0].m, 20u);
    EXPECT_GE(*rows[0].best_dev_pct, 0.0);
}

TEST_F(Scratch, SweepTenSeedsWritesTenTraces) {
    const auto traces = dir / "traces";
    const auto r = cli({"sweep", "--instance", "att48", "--variant", "dea", "--classifier", "mts", "--seeds", "10",
                        "--iters", "30", "--trace", traces.string()});
    ASSERT_EQ(r.status, 0) << r.err;
    std::vector<std::string> files;
    for (const auto &e : fs::directory_iterator(traces)) files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    EXPECT_EQ(files.size(), 10u);
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[1].rfind("att48,DEAM,", 0), 0u);

    // report over the saved traces recomputes the same row
    std::vector<std::string> args{"report", "--instance", "att48", "--variant", "dea", "--classifier", "mts"};
    args.insert(args.end(), files.begin(), files.end());
    const auto rep = cli(args);
    ASSERT_EQ(rep.status, 0) << rep.err;
    EXPECT_EQ(rep.out, r.out);

    args[0] = "quartiles";
    const auto q = cli(args);
    ASSERT_EQ(q.status, 0) << q.err;
    const auto ql = lines(q.out);
    ASSERT_EQ(ql.size(), 3u);
    EXPECT_EQ(ql[0][0], '#');
    EXPECT_EQ(ql[1], eaco::quartile_header);
    EXPECT_EQ(ql[2].rfind("att48,DEAM,", 0), 0u);
    EXPECT_NE(ql[2].find(",10,10"), std::string::npos);
}

TEST_F(Scratch, GridFile) {
    const auto grid = dir / "grid.json";
    std::ofstream(grid) << R"({"instances": ["bays29"], "variants": ["dea", "ea"], "classifiers": ["mrts", "mts"],
                             "alpha": [1, 2], "beta": [2], "rho": [0.9], "seeds": 2, "iters": 15})";
    const auto r = cli({"sweep", "--grid", grid.string(), "--trace", (dir / "t").string()});
    ASSERT_EQ(r.status, 0) << r.err;
    // (DEAMR, DEAM, EA) x two alpha values
    EXPECT_EQ(lines(r.out).size(), 1u + 6u);
    EXPECT_NE(r.out.find("bays29,DEAMR/a2/b2/r0.9,"), std::string::npos);
    std::size_t n = 0;
    for ([[maybe_unused]] const auto &e : fs::directory_iterator(dir / "t")) ++n;
    EXPECT_EQ(n, 12u);
}

TEST_F(Scratch, OutputFileAndDeterminism) {
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    const auto ta = dir / "a.jsonl";
    const auto tb = dir / "b.jsonl";
    for (const auto &[out, tr] : {std::pair{a, ta}, std::pair{b, tb}}) {
        const auto r = cli({"run", "--instance", "bays29", "--variant", "dea-pun", "--classifier", "mts", "--iters",
                            "100", "--seed-base", "17", "--out", out.string(), "--trace", tr.string()});
        ASSERT_EQ(r.status, 0) << r.err;
        EXPECT_TRUE(r.out.empty());
    }
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(ta), slurp(tb));
    EXPECT_EQ(lines(slurp(ta)).size(), 100u);
}

TEST(Cli, QuartilesByRunning) {
    const auto r = cli({"quartiles", "--instance", "bays29", "--variant", "dra", "--classifier", "mrts", "--iters",
                        "40", "--seeds", "2"});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 3u);
}

TEST(Cli, StandaloneBinary) {
    const std::string cmd = std::string(EACO_CLI_PATH) +
                            " run --instance bays29 --variant ea --iters 10 --seed-base 3 2>&1";
    FILE *p = popen(cmd.c_str(), "r");
    ASSERT_NE(p, nullptr);
    std::string text;
    char buf[256];
    while (fgets(buf, sizeof buf, p)) text += buf;
    const int status = pclose(p);
    EXPECT_EQ(status, 0) << text;
    EXPECT_EQ(text.rfind(eaco::csv_header, 0), 0u) << text;

    FILE *bad = popen((std::string(EACO_CLI_PATH) + " run --instance bays29 --variant as --classifier mts 2>&1").c_str(),
                      "r");
    ASSERT_NE(bad, nullptr);
    while (fgets(buf, sizeof buf, bad)) {
    }
    EXPECT_NE(pclose(bad), 0);
}
