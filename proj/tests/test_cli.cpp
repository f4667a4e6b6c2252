#include <gtest/gtest.h>
#include <sys/wait.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "../tools/manifest.hpp"

#ifndef HELPANN_CLI
#error "HELPANN_CLI must name the CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + HELPANN_CLI + std::string(" ") + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json last_manifest(const fs::path& p, const std::string& command = "") {
    std::ifstream in(p);
    std::string line;
    nlohmann::json last;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto record = nlohmann::json::parse(line);
        if (command.empty() || record["command"] == command) last = std::move(record);
    }
    return last;
}

std::size_t line_count(const fs::path& p) {
    const auto s = slurp(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

/// Dataset + index shared by every test in the suite.
class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new fixture::TempDir("cli");
        ASSERT_EQ(run("gen-data --n 2000 --m 8 --l 3 --pool 3 --seed 1 --queries 20 --min-matches 10 --out-dir " +
                      d("data")),
                  0);
        ASSERT_EQ(run("build --base " + d("data/base.fvecs") + " --base-attr " + d("data/base.attr") + " --out " +
                      d("data/idx.help") + " --gamma 16 --gamma-new 16"),
                  0);
        ASSERT_EQ(run("gt " + queries() + " --base " + d("data/base.fvecs") + " --base-attr " + d("data/base.attr") +
                      " --out " + d("data/gt.ivecs")),
                  0);
    }
    static void TearDownTestSuite() { delete dir_; }

    static std::string d(const std::string& rel) { return (dir_->path() / rel).string(); }
    static std::string queries() {
        return "--queries " + d("data/query.fvecs") + " --query-attr " + d("data/query.attr") + " --query-mask " +
               d("data/query.mask");
    }
    static std::string search_args() { return "search --index " + d("data/idx.help") + " " + queries(); }
    static std::string bench_args() {
        return "bench --index " + d("data/idx.help") + " " + queries() + " --gt " + d("data/gt.ivecs");
    }

    static fixture::TempDir* dir_;
};

fixture::TempDir* Cli::dir_ = nullptr;

}  // namespace

TEST_F(Cli, GenDataWritesSchemaHeader) {
    EXPECT_EQ(slurp(d("data/base.attr")).rfind("#schema v1 L=3\n", 0), 0u);
    EXPECT_EQ(last_manifest(d("data/manifest.jsonl"), "gen-data")["info"]["theta"], 27);
}

TEST_F(Cli, GenDataIsReproducible) {
    const std::string flags = "gen-data --n 500 --m 4 --l 3 --pool 3 --seed 5 --queries 5 --min-matches 2 --out-dir ";
    ASSERT_EQ(run(flags + d("a")), 0);
    ASSERT_EQ(run(flags + d("b")), 0);
    for (const auto* f : {"base.fvecs", "base.attr", "query.fvecs", "query.attr", "query.mask"})
        EXPECT_EQ(helpann::tool::file_crc32(d(std::string("a/") + f)), helpann::tool::file_crc32(d(std::string("b/") + f)))
            << f;
}

TEST_F(Cli, ManifestRecordsCardinality) {
    ASSERT_EQ(run("gen-data --n 3000 --m 4 --l 7 --pool 3 --seed 2 --queries 3 --min-matches 1 --out-dir " + d("l7")),
              0);
    EXPECT_EQ(last_manifest(d("l7/manifest.jsonl"))["info"]["theta"], 2187);
}

TEST_F(Cli, ManifestsAreAppendOnly) {
    const auto before = line_count(d("data/manifest.jsonl"));
    ASSERT_EQ(run(search_args() + " --out " + d("data/append.tsv")), 0);
    EXPECT_EQ(line_count(d("data/manifest.jsonl")), before + 1);
}

TEST_F(Cli, BuildRecordsAlphaProvenance) {
    ASSERT_EQ(run("build --base " + d("data/base.fvecs") + " --base-attr " + d("data/base.attr") + " --out " +
                  d("auto/idx.help") + " --gamma 8 --gamma-new 8 --alpha auto"),
              1);  // missing output directory is an I/O error
    fs::create_directories(d("auto"));
    ASSERT_EQ(run("build --base " + d("data/base.fvecs") + " --base-attr " + d("data/base.attr") + " --out " +
                  d("auto/idx.help") + " --gamma 8 --gamma-new 8 --alpha auto"),
              0);
    auto m = last_manifest(d("auto/manifest.jsonl"))["info"]["metric"];
    EXPECT_EQ(m["source"], "auto");
    EXPECT_EQ(m["n_total"], 2000);
    EXPECT_GT(m["avg_feature_distance"].get<double>(), 0.0);
    EXPECT_NEAR(m["alpha"].get<double>(), m["feature_term"].get<double>() + m["attribute_term"].get<double>(), 1e-12);

    ASSERT_EQ(run("build --base " + d("data/base.fvecs") + " --base-attr " + d("data/base.attr") + " --out " +
                  d("auto/manual.help") + " --gamma 8 --gamma-new 8 --alpha 0.8"),
              0);
    m = last_manifest(d("auto/manifest.jsonl"))["info"]["metric"];
    EXPECT_EQ(m["source"], "manual");
    EXPECT_EQ(m["alpha"], 0.8);
}

TEST_F(Cli, BuildDefaultsAccepted) {
    fs::create_directories(d("defaults"));
    EXPECT_EQ(run("build --base " + d("data/base.fvecs") + " --base-attr " + d("data/base.attr") + " --out " +
                  d("defaults/idx.help") + " --gamma 100 --sigma 0.44"),
              0);
    const auto cfg = last_manifest(d("defaults/manifest.jsonl"))["config"];
    EXPECT_EQ(cfg["gamma"], 100);
    EXPECT_EQ(cfg["gamma_new"], 100);
    EXPECT_EQ(cfg["psi_target"], 0.8);
}

TEST_F(Cli, UnreachedQualityExitsWithConstraintCode) {
    fs::create_directories(d("weak"));
    EXPECT_EQ(run("build --base " + d("data/base.fvecs") + " --base-attr " + d("data/base.attr") + " --out " +
                  d("weak/idx.help") + " --gamma 8 --gamma-new 1 --psi 1.0 --max-iterations 1"),
              4);
    EXPECT_EQ(last_manifest(d("weak/manifest.jsonl"))["info"]["termination"], "iteration_cap");
}

TEST_F(Cli, SearchIsDeterministicAndPioneerDefaultsToHalfK) {
    ASSERT_EQ(run(search_args() + " --k 10 --seed 3 --out " + d("data/r1.tsv")), 0);
    ASSERT_EQ(run(search_args() + " --k 10 --seed 3 --out " + d("data/r2.tsv")), 0);
    ASSERT_EQ(run(search_args() + " --k 10 --seed 3 --pioneer 5 --out " + d("data/r3.tsv") + " --out-ivecs " +
                  d("data/r3.ivecs")),
              0);
    EXPECT_EQ(helpann::tool::file_crc32(d("data/r1.tsv")), helpann::tool::file_crc32(d("data/r2.tsv")));
    EXPECT_EQ(slurp(d("data/r1.tsv")), slurp(d("data/r3.tsv")));
    EXPECT_EQ(line_count(d("data/r1.tsv")), 20u * 10u);
    std::istringstream first(slurp(d("data/r1.tsv")));
    std::string q, rank, id, dist;
    std::getline(first, q, '\t');
    std::getline(first, rank, '\t');
    std::getline(first, id, '\t');
    std::getline(first, dist);
    EXPECT_EQ(q, "0");
    EXPECT_EQ(rank, "0");
    EXPECT_TRUE(fs::exists(d("data/r3.ivecs")));
}

TEST_F(Cli, SearchWithMissingIndexFails) {
    EXPECT_NE(run("search --index " + d("nope.help") + " " + queries() + " --out " + d("x.tsv")), 0);
}

TEST_F(Cli, CorruptIndexIsFormatError) {
    std::ofstream(d("bad.help")) << "NOPE";
    EXPECT_EQ(run("search --index " + d("bad.help") + " " + queries() + " --out " + d("x.tsv")), 3);
}

TEST_F(Cli, BenchSweepsEveryK) {
    ASSERT_EQ(run(bench_args() + " --k-values 10,50,100,200,500 --passes 1 --out " + d("data/b1.csv")), 0);
    ASSERT_EQ(run(bench_args() + " --k-values 10,50,100,200,500 --passes 1 --out " + d("data/b2.csv")), 0);
    EXPECT_EQ(line_count(d("data/b1.csv")), 6u);
    auto recall_column = [](const std::string& text) {
        std::istringstream in(text);
        std::string line, out;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::istringstream f(line);
            std::string k, p, r;
            std::getline(f, k, ',');
            std::getline(f, p, ',');
            std::getline(f, r, ',');
            out += r + ";";
        }
        return out;
    };
    EXPECT_EQ(recall_column(slurp(d("data/b1.csv"))), recall_column(slurp(d("data/b2.csv"))));
}

TEST_F(Cli, BenchRejectsKBeyondN) {
    EXPECT_EQ(run(bench_args() + " --k-values 10,2001 --passes 1 --out " + d("data/b3.csv")), 2);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
    fs::create_directories(d("cfg"));
    std::ofstream(d("cfg/build.conf")) << "# build settings\ngamma=12\ngamma-new=6\nsigma=0.5\nbase=" +
                                              d("data/base.fvecs") + "\nbase-attr=" + d("data/base.attr") + "\n";
    ASSERT_EQ(run("build --config " + d("cfg/build.conf") + " --gamma 10 --out " + d("cfg/idx.help")), 0);
    const auto cfg = last_manifest(d("cfg/manifest.jsonl"))["config"];
    EXPECT_EQ(cfg["gamma"], 10);
    EXPECT_EQ(cfg["gamma_new"], 6);
    EXPECT_EQ(cfg["sigma"], 0.5);

    std::ofstream(d("cfg/bad.conf")) << "gama=12\n";
    EXPECT_EQ(run("build --config " + d("cfg/bad.conf") + " --base " + d("data/base.fvecs") + " --base-attr " +
                  d("data/base.attr") + " --out " + d("cfg/x.help")),
              2);
}

TEST_F(Cli, StableThreadsOverridesBuildThreads) {
    fs::create_directories(d("threads"));
    ASSERT_EQ(run("build --base " + d("data/base.fvecs") + " --base-attr " + d("data/base.attr") + " --out " +
                      d("threads/idx.help") + " --gamma 8 --gamma-new 8 --threads 2",
                  "STABLE_THREADS=3"),
              0);
    EXPECT_EQ(last_manifest(d("threads/manifest.jsonl"))["config"]["threads"], 3);
    EXPECT_EQ(run("build --base " + d("data/base.fvecs") + " --base-attr " + d("data/base.attr") + " --out " +
                      d("threads/idx2.help"),
                  "STABLE_THREADS=zero"),
              2);
}

TEST_F(Cli, EmptyMatchQueryGivesEmptyRecord) {
    fs::create_directories(d("empty"));
    // A label combination no base record carries: the pool has three labels
    // but 2,000 records of three dimensions all exist, so use a fresh label.
    std::ofstream(d("empty/q.attr")) << "#schema v1 L=3\n#dict 0 v1,v2,v3\n#dict 1 v1,v2,v3\n#dict 2 v1,v2,v3\n"
                                     << "v1,v1,v1\n";
    // Base with every record on pattern v2,v2,v2 guarantees no match for v1,v1,v1.
    std::ofstream base(d("empty/base.attr"));
    base << "#schema v1 L=3\n#dict 0 v1,v2,v3\n#dict 1 v1,v2,v3\n#dict 2 v1,v2,v3\n";
    for (int i = 0; i < 2000; ++i) base << "v2,v2,v2\n";
    base.close();
    std::ifstream qf(d("data/query.fvecs"), std::ios::binary);
    std::vector<char> record(4 + 8 * 4);
    qf.read(record.data(), static_cast<std::streamsize>(record.size()));
    std::ofstream(d("empty/q.fvecs"), std::ios::binary).write(record.data(), static_cast<std::streamsize>(record.size()));

    ASSERT_EQ(run("gt --base " + d("data/base.fvecs") + " --base-attr " + d("empty/base.attr") + " --queries " +
                  d("empty/q.fvecs") + " --query-attr " + d("empty/q.attr") + " --out " + d("empty/gt.ivecs")),
              0);
    EXPECT_EQ(fs::file_size(d("empty/gt.ivecs")), 4u);  // one zero-length record
    EXPECT_EQ(last_manifest(d("empty/manifest.jsonl"))["info"]["empty_matches"], 1);
}

TEST_F(Cli, GroundTruthIsStableOnRerun) {
    const auto before = helpann::tool::file_crc32(d("data/gt.ivecs"));
    ASSERT_EQ(run("gt " + queries() + " --base " + d("data/base.fvecs") + " --base-attr " + d("data/base.attr") +
                  " --out " + d("data/gt.ivecs")),
              0);
    EXPECT_EQ(helpann::tool::file_crc32(d("data/gt.ivecs")), before);
}

TEST_F(Cli, UnknownFlagIsArgumentError) { EXPECT_EQ(run("build --bogus"), 2); }
