#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "oracles.hpp"
#include "stwalk_cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "stwalk");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    int code = stwalk::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return { code, out.str(), err.str() };
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        out[entry.path().filename().string()] = oracle::read_file(entry.path());
    }
    return out;
}

class CliPipeline : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir = std::make_unique<oracle::TempDir>("cli");
        auto r = run({ "generate", "--out", (dir->path() / "data").string(), "--nodes", "60", "--steps", "5", "--p-in", "0.2", "--p-out", "0.02", "--seed", "3" });
        ASSERT_EQ(r.code, 0) << r.err;
    }

    static void TearDownTestSuite() {
        dir.reset();
    }

    static std::string data(const std::string& leaf) {
        return (dir->path() / "data" / leaf).string();
    }

    static std::string scratch(const std::string& leaf) {
        return (dir->path() / leaf).string();
    }

    static std::vector<std::string> embed_args(const std::string& method, const std::string& out) {
        return { "embed", "--graph", data("manifest.txt"), "--method", method, "--out", out, "--dim", "8", "--tau", "2",
                 "--walk-len", "8", "--restarts", "3", "--seed", "5", "--threads", "1" };
    }

    static inline std::unique_ptr<oracle::TempDir> dir;
};

}

TEST(Cli, GenerateTwiceByteIdentical) {
    oracle::TempDir dir("cli_gen");
    auto a = run({ "generate", "--out", (dir.path() / "a").string(), "--seed", "7" });
    auto b = run({ "generate", "--out", (dir.path() / "b").string(), "--seed", "7" });
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    auto fa = directory_bytes(dir.path() / "a");
    EXPECT_EQ(fa, directory_bytes(dir.path() / "b"));
    EXPECT_TRUE(fa.count("run_manifest.json"));
    EXPECT_TRUE(fa.count("labels.txt"));
    auto manifest = nlohmann::json::parse(fa["run_manifest.json"]);
    EXPECT_EQ(manifest["seed"], 7);
    EXPECT_EQ(manifest["parameters"]["nodes"], 300);
}

TEST(Cli, UsageErrorsExitTwo) {
    auto none = run({});
    EXPECT_EQ(none.code, 2);
    auto bogus = run({ "bogus" });
    EXPECT_EQ(bogus.code, 2);
    EXPECT_NE(bogus.err.find("Usage"), std::string::npos);
    auto flag = run({ "generate", "--out", "x", "--frobnicate", "1" });
    EXPECT_EQ(flag.code, 2);
    auto missing = run({ "embed", "--graph", "g" });
    EXPECT_EQ(missing.code, 2);
}

TEST(Cli, HelpExitsZero) {
    auto top = run({ "--help" });
    EXPECT_EQ(top.code, 0);
    EXPECT_NE(top.out.find("embed"), std::string::npos);
    for (const char* sub : { "generate", "embed", "classify", "changepoint", "arith", "pca" }) {
        auto r = run({ sub, "--help" });
        EXPECT_EQ(r.code, 0) << sub;
        EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
    }
}

TEST_F(CliPipeline, RuntimeFailuresExitOneWithOneLine) {
    auto bad_method = run(embed_args("lstm", scratch("x.txt")));
    EXPECT_EQ(bad_method.code, 1);
    EXPECT_NE(bad_method.err.find("error: unknown method"), std::string::npos);
    EXPECT_EQ(std::count(bad_method.err.begin(), bad_method.err.end(), '\n'), 1);

    auto missing = run({ "classify", "--embeddings", scratch("nope.txt"), "--graph", data("manifest.txt"), "--labels", data("labels.txt") });
    EXPECT_EQ(missing.code, 1);

    auto bad_tau = run({ "embed", "--graph", data("manifest.txt"), "--method", "stwalk2", "--out", scratch("x.txt"), "--tau", "9" });
    EXPECT_EQ(bad_tau.code, 1);

    auto bad_p = run({ "generate", "--out", scratch("g"), "--p-in", "0.01", "--p-out", "0.5" });
    EXPECT_EQ(bad_p.code, 1);
}

TEST_F(CliPipeline, EmbedIsByteDeterministic) {
    for (const char* method : { "stwalk1", "stwalk2", "pagerank", "avg-deepwalk" }) {
        auto a = scratch(std::string(method) + "_a.txt");
        auto b = scratch(std::string(method) + "_b.txt");
        ASSERT_EQ(run(embed_args(method, a)).code, 0);
        ASSERT_EQ(run(embed_args(method, b)).code, 0);
        auto bytes = oracle::read_file(a);
        EXPECT_FALSE(bytes.empty());
        EXPECT_EQ(bytes, oracle::read_file(b)) << method;
        auto manifest = nlohmann::json::parse(oracle::read_file(a + ".manifest.json"));
        EXPECT_EQ(manifest["seed"], 5);
        EXPECT_EQ(manifest["parameters"]["tau"], 2);
    }
}

TEST_F(CliPipeline, EmbedCoversEveryWindowByDefault) {
    auto out = scratch("windows.txt");
    ASSERT_EQ(run(embed_args("pagerank", out)).code, 0);
    auto emb = stwalk::load_embeddings(fs::path(out));
    EXPECT_EQ(emb.dim, 3u);
    std::set<std::string> times;
    for (const auto& t : emb.tokens) {
        times.insert(t.substr(t.rfind('@') + 1));
    }
    EXPECT_EQ(times, (std::set<std::string>{ "3", "4", "5" }));

    auto args = embed_args("stwalk2", scratch("one.txt"));
    args.insert(args.end(), { "--t", "5" });
    ASSERT_EQ(run(args).code, 0);
    auto one = stwalk::load_embeddings(fs::path(scratch("one.txt")));
    for (const auto& t : one.tokens) {
        EXPECT_EQ(t.substr(t.rfind('@')), "@5");
    }
}

TEST_F(CliPipeline, GenerateEmbedClassifyComposes) {
    auto emb = scratch("classify_emb.txt");
    ASSERT_EQ(run(embed_args("stwalk2", emb)).code, 0);
    auto report = scratch("report.txt");
    auto r = run({ "classify", "--embeddings", emb, "--graph", data("manifest.txt"), "--labels", data("labels.txt"), "--tau", "2",
                   "--out", report });
    ASSERT_EQ(r.code, 0) << r.err;
    std::smatch m;
    ASSERT_TRUE(std::regex_search(r.out, m, std::regex("mean accuracy ([0-9.]+)")));
    double acc = std::stod(m[1]);
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n') > 5, true);
    EXPECT_EQ(oracle::read_file(report), r.out);
    EXPECT_NE(r.out.find("method stwalk2"), std::string::npos);
    EXPECT_TRUE(fs::exists(report + ".manifest.json"));
}

TEST_F(CliPipeline, ChangepointArithPca) {
    auto csv = scratch("cp.csv");
    auto cp = run({ "changepoint", "--graph", data("manifest.txt"), "--labels", data("labels.txt"), "--out", csv });
    ASSERT_EQ(cp.code, 0) << cp.err;
    EXPECT_EQ(oracle::read_file(csv).substr(0, 15), "duration,count\n");
    auto win = run({ "changepoint", "--graph", data("manifest.txt"), "--labels", data("labels.txt"), "--out", csv, "--level", "window", "--tau", "1" });
    EXPECT_EQ(win.code, 0) << win.err;
    auto bad = run({ "changepoint", "--graph", data("manifest.txt"), "--labels", data("labels.txt"), "--out", csv, "--level", "year" });
    EXPECT_EQ(bad.code, 1);

    auto emb = scratch("arith_emb.txt");
    ASSERT_EQ(run(embed_args("stwalk2", emb)).code, 0);
    auto ar = run({ "arith", "--embeddings", emb, "--graph", data("manifest.txt"), "--labels", data("labels.txt"), "--tau", "2" });
    ASSERT_EQ(ar.code, 0) << ar.err;
    EXPECT_NE(ar.out.find("fraction nearest c1 "), std::string::npos) << ar.out;

    auto pcs = scratch("pca.csv");
    auto pc = run({ "pca", "--embeddings", emb, "--graph", data("manifest.txt"), "--labels", data("labels.txt"), "--tau", "2", "--out", pcs });
    ASSERT_EQ(pc.code, 0) << pc.err;
    auto text = oracle::read_file(pcs);
    EXPECT_EQ(text.substr(0, text.find('\n')), "token,label,pc1,pc2");
    EXPECT_NE(text.find("Interdisciplinary"), std::string::npos);
}
