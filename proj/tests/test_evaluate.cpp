#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "depsel/error.hpp"
#include "depsel/evaluate.hpp"
#include "depsel/synthetic.hpp"

using namespace depsel;

namespace {

struct Fixture {
  LabeledCorpus corpus;
  EmbeddingStore store;
};

Fixture review_fixture(std::size_t n, std::uint64_t seed) {
  auto rc = synthetic::review_corpus(n, 30, seed);
  std::istringstream in(rc.csv);
  auto raw = load_csv(in, "comment", "rating");
  auto c = rebalance(collapse_scores(preprocess(raw, default_stopwords())), seed);
  return {std::move(c), std::move(rc.store)};
}

// Corpus whose tokens map to class-dependent embedding directions.
Fixture separable_fixture(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Fixture f{{}, EmbeddingStore(10)};
  for (int c = 0; c < 3; ++c)
    for (int w = 0; w < 5; ++w) {
      std::vector<double> v(10);
      for (auto& x : v) x = 0.3 * normal(rng);
      v[static_cast<std::size_t>(c)] += 3.0;
      f.store.insert("c" + std::to_string(c) + "w" + std::to_string(w), v);
    }
  std::uniform_int_distribution<int> word(0, 4);
  DocId id = 0;
  for (std::size_t i = 0; i < per_class; ++i)
    for (int c = 0; c < 3; ++c) {
      Document d;
      d.id = id++;
      d.raw_score = c == 0 ? 1 : (c == 1 ? 3 : 5);
      d.category = category_for_score(d.raw_score);
      for (int t = 0; t < 3; ++t) d.tokens.push_back("c" + std::to_string(c) + "w" + std::to_string(word(rng)));
      d.raw_text = d.tokens[0];
      f.corpus.documents.push_back(d);
    }
  f.corpus.balanced = true;
  return f;
}

ExperimentPlan single_plan(Featurizer f, Reducer r, ClassifierKind k) {
  ExperimentPlan p;
  p.featurizers = {f};
  p.reducers = {r};
  p.classifiers = {k};
  p.reduced_classifiers = {k};
  return p;
}

}  // namespace

TEST(Folds, FifteenBalancedIntoFive) {
  std::vector<int> labels;
  for (int i = 0; i < 15; ++i) labels.push_back(i % 3 + 1);
  const auto folds = stratified_folds(labels, 5, 1);
  ASSERT_EQ(folds.size(), 5u);
  std::vector<int> seen(15, 0);
  for (const auto& f : folds) {
    ASSERT_EQ(f.test.size(), 3u);
    std::set<int> classes;
    for (std::size_t i : f.test) {
      classes.insert(labels[i]);
      seen[i]++;
    }
    EXPECT_EQ(classes.size(), 3u);
    EXPECT_EQ(f.train.size(), 12u);
    for (std::size_t i : f.train) EXPECT_FALSE(std::count(f.test.begin(), f.test.end(), i));
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(Folds, TwoFoldsHalfPerClass) {
  std::vector<int> labels;
  for (int i = 0; i < 31; ++i) labels.push_back(i < 11 ? 1 : (i < 20 ? 2 : 3));
  const auto folds = stratified_folds(labels, 2, 7);
  for (const auto& f : folds)
    for (int c = 1; c <= 3; ++c) {
      const auto total = std::count(labels.begin(), labels.end(), c);
      const auto in_test = std::count_if(f.test.begin(), f.test.end(), [&](std::size_t i) { return labels[i] == c; });
      EXPECT_LE(std::abs(2 * in_test - total), 2);
    }
}

TEST(Folds, DeterministicAndSeedDependent) {
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(i % 3 + 1);
  const auto a = stratified_folds(labels, 5, 3);
  const auto b = stratified_folds(labels, 5, 3);
  const auto c = stratified_folds(labels, 5, 4);
  for (std::size_t f = 0; f < 5; ++f) EXPECT_EQ(a[f].test, b[f].test);
  bool differs = false;
  for (std::size_t f = 0; f < 5; ++f) differs = differs || a[f].test != c[f].test;
  EXPECT_TRUE(differs);
}

TEST(Folds, TooSmallClassNamed) {
  const std::vector<int> labels{1, 1, 1, 2, 2, 2, 3, 3};
  try {
    stratified_folds(labels, 3, 0);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("class 3"), std::string::npos) << e.what();
  }
}

TEST(Experiment, SeparableEmbeddingsGsvm) {
  const auto f = separable_fixture(40, 1);
  const auto report = run_experiment(f.corpus, &f.store, single_plan(Featurizer::W2V, Reducer::None, ClassifierKind::GSVM));
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_GE(report.rows[0].mean_accuracy, 90.0);
}

TEST(Experiment, ShuffledLabelsAreChance) {
  double total = 0;
  std::size_t rows = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto f = review_fixture(600, seed);
    std::vector<Category> cats;
    for (const auto& d : f.corpus.documents) cats.push_back(d.category);
    std::mt19937_64 rng(seed + 100);
    std::shuffle(cats.begin(), cats.end(), rng);
    for (std::size_t i = 0; i < cats.size(); ++i) f.corpus.documents[i].category = cats[i];
    ExperimentPlan plan;
    plan.featurizers = {Featurizer::W2V};
    plan.reducers = {Reducer::None};
    plan.seed = seed;
    for (const auto& row : run_experiment(f.corpus, &f.store, plan).rows) {
      total += row.mean_accuracy;
      ++rows;
    }
  }
  EXPECT_NEAR(total / static_cast<double>(rows), 100.0 / 3.0, 6.0);
}

TEST(Experiment, W2vWithoutStoreIsConfigError) {
  const auto f = separable_fixture(10, 1);
  EXPECT_THROW(run_experiment(f.corpus, nullptr, ExperimentPlan{}), ConfigError);
}

TEST(Experiment, SingleCategoryRejectedUpstream) {
  auto f = separable_fixture(10, 1);
  for (auto& d : f.corpus.documents) {
    d.raw_score = 5;
    d.category = Category::Agree;
  }
  EXPECT_THROW(rebalance(f.corpus, 0), InputError);
}

TEST(Experiment, PaperShapedGridAndInvariants) {
  const auto f = review_fixture(240, 3);
  ExperimentPlan plan;
  plan.seed = 9;
  plan.target_dim = 5;
  const auto report = run_experiment(f.corpus, &f.store, plan);
  // 6 BOW + 6 TF-IDF + 6 W2V + 3 reduced
  ASSERT_EQ(report.rows.size(), 21u);
  std::size_t reduced = 0;
  std::map<DocId, Category> truth;
  for (const auto& d : f.corpus.documents) truth[d.id] = d.category;
  for (const auto& row : report.rows) {
    std::array<std::size_t, 3> counts{};
    for (const auto& [id, _] : row.predictions) counts[static_cast<std::size_t>(class_code(truth.at(id)) - 1)]++;
    if (row.featurizer != Featurizer::W2V) EXPECT_EQ(row.reducer, Reducer::None);
    if (row.reducer != Reducer::None) {
      ++reduced;
      EXPECT_EQ(row.classifier, ClassifierKind::GSVM);
    }
    ASSERT_EQ(row.fold_accuracies.size(), 5u);
    double sum = 0;
    for (double a : row.fold_accuracies) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 100.0);
      sum += a;
    }
    EXPECT_NEAR(row.mean_accuracy, sum / 5.0, 1e-9);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto row_sum = std::accumulate(row.confusion[c].begin(), row.confusion[c].end(), std::size_t{0});
      EXPECT_EQ(row_sum, counts[c]);
    }
    const std::size_t kept = f.corpus.documents.size() - (report.dropped.contains(std::string(to_string(row.featurizer)))
                                                              ? report.dropped.at(std::string(to_string(row.featurizer))).size()
                                                              : 0);
    EXPECT_EQ(row.predictions.size(), kept);
  }
  EXPECT_EQ(reduced, 3u);
  EXPECT_EQ(report.qualitative.methods.size(), 4u);
  EXPECT_FALSE(report.qualitative.rows.empty());

  const std::string md = report_markdown(report);
  EXPECT_NE(md.find("| Machine Learning Method | BOW Accuracy (%) | TF-IDF Accuracy (%) |"), std::string::npos);
  EXPECT_NE(md.find("W2V + PCA + G-SVM"), std::string::npos);
  EXPECT_NE(md.find("W2V + RDC + G-SVM"), std::string::npos);
  EXPECT_NE(md.find("W2V + MMD + G-SVM"), std::string::npos);
}

TEST(Experiment, DeterministicReport) {
  const auto f = review_fixture(150, 4);
  ExperimentPlan plan;
  plan.featurizers = {Featurizer::TFIDF, Featurizer::W2V};
  plan.classifiers = {ClassifierKind::GNB, ClassifierKind::GSVM};
  plan.target_dim = 4;
  plan.seed = 2;
  auto strip = [](nlohmann::json j) {
    for (auto& row : j["rows"])
      for (const char* k : {"reducer_seconds", "fit_seconds", "predict_seconds"}) row.erase(k);
    return j.dump();
  };
  EXPECT_EQ(strip(to_json(run_experiment(f.corpus, &f.store, plan))),
            strip(to_json(run_experiment(f.corpus, &f.store, plan))));
}

TEST(Experiment, TrainingAccuracyAtLeastTest) {
  const auto d = synthetic::gaussian_blobs(150, 5, 3, 3.0, 5);
  const auto folds = stratified_folds(d.labels, 5, 1);
  double train_acc = 0, test_acc = 0;
  for (const auto& f : folds) {
    Matrix xtr(static_cast<Eigen::Index>(f.train.size()), 5), xte(static_cast<Eigen::Index>(f.test.size()), 5);
    std::vector<int> ytr, yte;
    for (std::size_t i = 0; i < f.train.size(); ++i) {
      xtr.row(static_cast<Eigen::Index>(i)) = d.x.row(static_cast<Eigen::Index>(f.train[i]));
      ytr.push_back(d.labels[f.train[i]]);
    }
    for (std::size_t i = 0; i < f.test.size(); ++i) {
      xte.row(static_cast<Eigen::Index>(i)) = d.x.row(static_cast<Eigen::Index>(f.test[i]));
      yte.push_back(d.labels[f.test[i]]);
    }
    const auto m = fit(ClassifierKind::GSVM, xtr, ytr, HyperParams{});
    auto acc = [](const std::vector<int>& p, const std::vector<int>& y) {
      double h = 0;
      for (std::size_t i = 0; i < p.size(); ++i) h += p[i] == y[i];
      return h / static_cast<double>(p.size());
    };
    train_acc += acc(predict(m, xtr), ytr);
    test_acc += acc(predict(m, xte), yte);
  }
  EXPECT_GE(train_acc, test_acc);
}

TEST(Reducer, FitReadsOnlyTrainingRows) {
  const auto d = synthetic::planted_features(90, 12, 3, 1.0, 2);
  const auto folds = stratified_folds(d.labels, 5, 0);
  ExperimentPlan plan;
  plan.target_dim = 4;
  for (Reducer r : {Reducer::PCA, Reducer::GreedyRDC, Reducer::GreedyMMD}) {
    const auto a = fit_reducer(r, d.x, d.labels, folds[0].train, plan, 5);
    Matrix mutated = d.x;
    std::vector<int> labels = d.labels;
    for (std::size_t i : folds[0].test) {
      mutated.row(static_cast<Eigen::Index>(i)).setConstant(1e6);
      labels[i] = 1;
    }
    const auto b = fit_reducer(r, mutated, labels, folds[0].train, plan, 5);
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump()) << to_string(r);
  }
}

TEST(Reducer, JsonRoundTripTransformsIdentically) {
  const auto d = synthetic::planted_features(60, 8, 2, 1.0, 3);
  std::vector<std::size_t> all(60);
  std::iota(all.begin(), all.end(), 0);
  ExperimentPlan plan;
  plan.target_dim = 3;
  for (Reducer r : {Reducer::None, Reducer::PCA, Reducer::GreedyRDC, Reducer::GreedyMMD}) {
    const auto s = fit_reducer(r, d.x, d.labels, all, plan, 1);
    const auto back = ReducerState::from_json(nlohmann::json::parse(s.to_json().dump()));
    EXPECT_EQ(back.transform(d.x), s.transform(d.x)) << to_string(r);
  }
}

TEST(Qualitative, MarksAndLayout) {
  LabeledCorpus c;
  for (DocId id : {4, 9}) {
    Document d;
    d.id = id;
    d.raw_text = id == 4 ? "Loved it" : "Too hard";
    d.category = id == 4 ? Category::Agree : Category::Disagree;
    c.documents.push_back(d);
  }
  const MethodPredictions preds{
      {"Gaussian SVM", {{4, Category::Agree}, {9, Category::Disagree}}},
      {"RDC", {{4, Category::Agree}, {9, Category::Disagree}}},
      {"PCA", {{4, Category::Agree}, {9, Category::Disagree}}},
      {"MMD", {{4, Category::Agree}, {9, Category::Neutral}}},
  };
  const auto r = qualitative_report(c, preds);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(std::count(r.rows[0].correct.begin(), r.rows[0].correct.end(), true), 4);
  EXPECT_EQ(std::count(r.rows[1].correct.begin(), r.rows[1].correct.end(), false), 1);
  EXPECT_FALSE(r.rows[1].correct[3]);
  const std::string md = qualitative_markdown(r);
  EXPECT_NE(md.find("All Correct"), std::string::npos);
  EXPECT_NE(md.find("| Gaussian SVM | RDC | PCA | MMD |"), std::string::npos);
  EXPECT_NE(md.find("| Pos | Pos | Pos | Pos |"), std::string::npos);
  EXPECT_NE(md.find("| Neg | Neg | Neg | Neu |"), std::string::npos);
  EXPECT_NE(md.find("Response: *Too hard*"), std::string::npos);
}

TEST(Qualitative, MismatchedSetsAndEmpty) {
  LabeledCorpus c;
  Document d;
  d.id = 1;
  c.documents.push_back(d);
  const MethodPredictions bad{{"A", {{1, Category::Agree}}}, {"B", {}}};
  EXPECT_THROW(qualitative_report(c, bad), InputError);
  const MethodPredictions empty{{"A", {}}, {"B", {}}};
  EXPECT_TRUE(qualitative_report(c, empty).rows.empty());
}

TEST(Plan, ValidationAndJson) {
  ExperimentPlan p;
  p.folds = 1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = ExperimentPlan{};
  p.featurizers.clear();
  EXPECT_THROW(p.validate(), ConfigError);
  p = ExperimentPlan{};
  p.seed = 77;
  p.target_dim = 11;
  p.classifiers = {ClassifierKind::LDA};
  const auto back = plan_from_json(to_json(p));
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.target_dim, 11u);
  EXPECT_EQ(back.classifiers, p.classifiers);
  EXPECT_EQ(back.featurizers, p.featurizers);
}
