#include <gtest/gtest.h>

#include <cstdio>
#include <sys/wait.h>

#include "depsel/synthetic.hpp"
#include "json.hpp"
#include "test_util.hpp"

using testutil::read_file;
using testutil::TempDir;
using testutil::write_file;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(const TempDir& dir, const std::string& args) {
  const auto err_path = dir / "stderr.txt";
  const std::string cmd = std::string(DEPSEL_CLI_PATH) + " " + args + " 2> '" + err_path.string() + "'";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_file(err_path);
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto rc = depsel::synthetic::review_corpus(240, 12, 5);
    write_file(dir / "reviews.csv", rc.csv);
    depsel::synthetic::write_text_embeddings((dir / "vectors.txt").string(), rc.store);
    base = "--input '" + (dir / "reviews.csv").string() + "' --text-col comment --score-col rating";
  }
  std::string p(const std::string& name) const { return "'" + (dir / name).string() + "'"; }

  TempDir dir{"cli"};
  std::string base;
};

nlohmann::json strip_timings(nlohmann::json j) {
  for (auto& row : j["rows"])
    for (const char* k : {"reducer_seconds", "fit_seconds", "predict_seconds"}) row.erase(k);
  return j;
}

}  // namespace

TEST_F(Cli, HelpListsEveryFlag) {
  const auto r = run(dir, "run --help");
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--input", "--text-col", "--score-col", "--embeddings", "--format", "--seed", "--featurizers",
                           "--reducers", "--classifiers", "--folds", "--target-dim", "--knn-k", "--c", "--max-iter",
                           "--svm-sigma", "--rdc-k", "--rdc-s", "--mmd-sigma", "--config", "--out"})
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  for (const char* sub : {"ingest", "featurize", "select", "run", "inspect", "stat", "bench"}) {
    const auto top = run(dir, "--help");
    EXPECT_NE(top.out.find(sub), std::string::npos) << sub;
  }
}

TEST_F(Cli, UnknownFlagIsUsageError) {
  const auto r = run(dir, "ingest --no-such-flag");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no-such-flag"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingInputNamesFlag) {
  const auto r = run(dir, "ingest --input " + p("absent.csv") + " --out " + p("o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--input"), std::string::npos) << r.err;
}

TEST_F(Cli, BadScoreNamesRow) {
  write_file(dir / "bad.csv", "comment,rating\ngood,5\nbad,seven\n");
  const auto r = run(dir, "ingest --input " + p("bad.csv") + " --text-col comment --score-col rating --out " + p("o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("row 2"), std::string::npos) << r.err;
}

TEST_F(Cli, IngestIsByteDeterministic) {
  ASSERT_EQ(run(dir, "ingest " + base + " --seed 3 --out " + p("a")).code, 0);
  ASSERT_EQ(run(dir, "ingest " + base + " --seed 3 --out " + p("b")).code, 0);
  EXPECT_EQ(read_file(dir / "a" / "corpus.json"), read_file(dir / "b" / "corpus.json"));
  const auto summary = nlohmann::json::parse(read_file(dir / "a" / "summary.json"));
  EXPECT_TRUE(summary.contains("rebalanced"));
}

TEST_F(Cli, W2vRunWithoutEmbeddingsNamesFlag) {
  const auto r = run(dir, "run " + base + " --featurizers W2V --out " + p("o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--embeddings"), std::string::npos) << r.err;
}

TEST_F(Cli, RunDeterministicAndInspect) {
  const std::string args = "run " + base + " --embeddings " + p("vectors.txt") +
                           " --featurizers TFIDF,W2V --classifiers GNB,GSVM --target-dim 4 --folds 3 --seed 11";
  ASSERT_EQ(run(dir, args + " --out " + p("r1")).code, 0);
  const auto second = run(dir, args + " --out " + p("r2"));
  ASSERT_EQ(second.code, 0) << second.err;
  const auto j1 = nlohmann::json::parse(read_file(dir / "r1" / "report.json"));
  const auto j2 = nlohmann::json::parse(read_file(dir / "r2" / "report.json"));
  EXPECT_EQ(strip_timings(j1), strip_timings(j2));
  EXPECT_NE(second.out.find("Word2Vec"), std::string::npos);

  const auto index = nlohmann::json::parse(read_file(dir / "r1" / "models.json"));
  ASSERT_FALSE(index.empty());
  for (const auto& entry : index)
    EXPECT_EQ(read_file(dir / "r1" / entry["path"].get<std::string>()),
              read_file(dir / "r2" / entry["path"].get<std::string>()));

  std::string models;
  for (const auto& entry : index) {
    if (!models.empty()) models += ",";
    models += (dir / "r1" / entry["path"].get<std::string>()).string();
  }
  const auto corpus = nlohmann::json::parse(read_file(dir / "r1" / "report.json"));
  const auto first_id = corpus["rows"][0]["predictions"][0][0].get<long long>();
  const std::string inspect = "inspect " + base + " --seed 11 --embeddings " + p("vectors.txt") + " --models '" + models + "'";
  const auto ok = run(dir, inspect + " --ids " + std::to_string(first_id));
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("Response:"), std::string::npos);

  const auto unknown = run(dir, inspect + " --ids 999999");
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("valid ids"), std::string::npos) << unknown.err;

  const auto none = run(dir, inspect);
  EXPECT_EQ(none.code, 0) << none.err;
}

TEST_F(Cli, ConfigFlagsTakePrecedence) {
  write_file(dir / "cfg.json", R"({"folds": 3, "seed": 4, "target_dim": 3})");
  const std::string args = "run " + base + " --featurizers BOW --classifiers GNB --config " + p("cfg.json");
  ASSERT_EQ(run(dir, args + " --out " + p("c1")).code, 0);
  ASSERT_EQ(run(dir, args + " --folds 4 --out " + p("c2")).code, 0);
  const auto j1 = nlohmann::json::parse(read_file(dir / "c1" / "report.json"));
  const auto j2 = nlohmann::json::parse(read_file(dir / "c2" / "report.json"));
  EXPECT_EQ(j1["rows"][0]["fold_accuracies"].size(), 3u);
  EXPECT_EQ(j2["rows"][0]["fold_accuracies"].size(), 4u);

  write_file(dir / "bad_cfg.json", R"({"foldz": 3})");
  const auto bad = run(dir, "run " + base + " --config " + p("bad_cfg.json") + " --out " + p("c3"));
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("foldz"), std::string::npos) << bad.err;
}

TEST_F(Cli, StatAndSelect) {
  write_file(dir / "x.csv", "a,b\n1,2\n2,1\n3,5\n4,3\n5,4\n6,8\n7,6\n8,7\n");
  write_file(dir / "y.csv", "c\n1\n4\n9\n16\n25\n36\n49\n64\n");
  const auto r = run(dir, "stat --x " + p("x.csv") + " --y " + p("y.csv") + " --stat rdc --rdc-k 3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("value"));
  EXPECT_GE(j["value"].get<double>(), 0.0);
  EXPECT_LE(j["value"].get<double>(), 1.0 + 1e-12);

  const auto mismatch = run(dir, "stat --x " + p("x.csv") + " --y " + p("y.csv") + " --stat mmd");
  EXPECT_EQ(mismatch.code, 2);

  ASSERT_EQ(run(dir, "featurize " + base + " --featurizer TFIDF --out " + p("f")).code, 0);
  const auto sel = run(dir, "select --input " + p("f/features.csv") + " --method mmd --target-dim 2");
  ASSERT_EQ(sel.code, 0) << sel.err;
  const auto sj = nlohmann::json::parse(sel.out);
  EXPECT_EQ(sj["selected"].size(), 2u);
}
